#include "ffsplit/mdp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

namespace ffsplit {
namespace {

FiniteMdp to_finite(const oracle::TinyMdp& t) {
  FiniteMdp m;
  m.states.resize(t.P.size());
  for (std::size_t s = 0; s < t.P.size(); ++s)
    for (std::size_t a = 0; a < t.r[s].size(); ++a) {
      FiniteMdp::Choice c;
      c.reward = t.r[s][a];
      for (std::size_t j = 0; j < t.P[s][a].size(); ++j) c.next.emplace_back(j, t.P[s][a][j]);
      m.states[s].push_back(std::move(c));
    }
  return m;
}

SystemConfig small_config(double mbps = 360.0) {
  SystemConfig cfg = nominal_config(mbps, 1.0);
  cfg.battery_capacity = 20.0;
  cfg.max_power = 6.0;
  return cfg;
}

TEST(Rvi, MatchesExhaustivePolicyEvaluation) {
  RviParams p;
  p.tolerance = 1e-11;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto tiny = oracle::random_tiny_mdp(seed, 2 + static_cast<int>(seed % 4), 2 + static_cast<int>(seed % 2));
    const RviResult r = relative_value_iteration(to_finite(tiny), p);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.gain, oracle::exhaustive_average_reward(tiny), 1e-8) << seed;
  }
}

TEST(Rvi, RelaxationDoesNotChangeGain) {
  const auto tiny = oracle::random_tiny_mdp(99, 5, 3);
  const double ref = oracle::exhaustive_average_reward(tiny);
  for (double tau : {0.1, 0.5, 0.9}) {
    RviParams p;
    p.relaxation = tau;
    p.tolerance = 1e-11;
    EXPECT_NEAR(relative_value_iteration(to_finite(tiny), p).gain, ref, 1e-8) << tau;
  }
}

TEST(StateSpace, NominalSizesAndRoundTrip) {
  const StateSpace sp(nominal_config());
  EXPECT_EQ(sp.battery_levels(), 101u);
  EXPECT_EQ(sp.arrival_levels(), 14u);
  EXPECT_EQ(sp.memory_levels(), 1u);
  EXPECT_EQ(sp.power_levels(), 20u);
  EXPECT_EQ(sp.action_count(), 61u);
  EXPECT_EQ(sp.unpruned_size(), 101u * 14 * 14 * 4 * 2 * 4);
  // epoch-start states carry the arrival, the other 7 phases do not
  EXPECT_EQ(sp.size(), 101u * 14 * 4 + 7u * 101 * 4);
  for (std::size_t i = 0; i < sp.size(); ++i) ASSERT_EQ(sp.index(sp.state(i)), i);
  for (std::size_t a = 0; a < sp.action_count(); ++a) ASSERT_EQ(sp.action_index(sp.action(a)), a);
}

TEST(StateSpace, SizeLimitIsReported) {
  SystemConfig cfg = nominal_config();
  cfg.mdp.max_states = 1000;
  EXPECT_THROW(StateSpace{cfg}, ConfigError);
}

TEST(Transition, RowsAreDistributionsAndBatteryLawHolds) {
  const StateSpace sp(small_config());
  std::mt19937_64 gen(1);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < sp.size(); i += 3) {
    const MdpState s = sp.state(i);
    for (std::size_t a = 0; a < sp.action_count(); a += 5) {
      const MdpAction act = sp.action(a);
      if (!sp.affordable(s, act)) {
        EXPECT_THROW(transition(sp, s, act), std::invalid_argument);
        continue;
      }
      const auto row = transition(sp, s, act);
      double sum = 0.0;
      for (const auto& [j, p] : row) {
        ASSERT_LT(j, sp.size());
        EXPECT_GT(p, 0.0);
        sum += p;
        const MdpState t = sp.state(j);
        // battery after = floor(min(B + E - use, Bmax))
        const double use = act.transmit ? sp.power_value(act.power) + sp.config().catalog[act.mode].processing_power : 0.0;
        const double expect = std::min(sp.battery_value(s.battery) + sp.arrival_value(s.arrival) - use,
                                       sp.config().battery_capacity);
        EXPECT_EQ(t.battery, sp.floor_battery(expect));
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(Reward, LogRateMinusFronthaulPrice) {
  const StateSpace sp(small_config());
  MdpState s;
  s.battery = 20;
  s.channel = 2;
  const MdpAction a{true, 3, 1};
  const double g = sp.config().channel.gains[2];
  EXPECT_NEAR(reward(sp, s, a, 1e-4), std::log1p(g * 3.0) - 1e-4 * 4660.0, 1e-12);
  EXPECT_EQ(reward(sp, s, MdpAction{}, 1e-4), 0.0);
}

TEST(Solve, StructuredEqualsExplicit) {
  const StateSpace sp(small_config());
  RviParams p;
  p.tolerance = 1e-10;
  for (double eta : {0.0, 2e-4}) {
    const RviResult a = solve_mdp(sp, eta, p);
    const FiniteMdp fm = explicit_mdp(sp, eta);
    RviParams q = p;
    q.reference = reference_state(sp);
    const RviResult b = relative_value_iteration(fm, q);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_NEAR(a.gain, b.gain, 1e-8) << eta;
    EXPECT_EQ(a.iterations, b.iterations);
  }
}

TEST(Solve, EvaluationAgreesWithGain) {
  const StateSpace sp(small_config());
  const double eta = 1e-4;
  const RviResult r = solve_mdp(sp, eta, {});
  const PolicyEvaluation ev = evaluate_policy(sp, r.policy);
  EXPECT_NEAR(ev.rate - eta * ev.fronthaul, r.gain, 1e-5 * (1 + r.gain));
  EXPECT_EQ(recurrent_classes(sp, r.policy), 1u);
}

TEST(Solve, FronthaulFallsAsPriceRises) {
  const StateSpace sp(small_config());
  double prev_fh = 1e300, prev_rate = 1e300;
  for (double eta : {0.0, 5e-5, 2e-4, 1e-3}) {
    const RviResult r = solve_mdp(sp, eta, {});
    const PolicyEvaluation ev = evaluate_policy(sp, r.policy);
    EXPECT_LE(ev.fronthaul, prev_fh * (1 + 1e-9));
    EXPECT_LE(ev.rate, prev_rate * (1 + 1e-9));
    prev_fh = ev.fronthaul;
    prev_rate = ev.rate;
  }
}

TEST(Calibration, MeetsBudget) {
  for (double mbps : {20.0, 40.0}) {
    const SystemConfig cfg = small_config(mbps);
    const StateSpace sp(cfg);
    const Calibration c = calibrate_eta(sp, cfg.fronthaul_budget, {});
    EXPECT_LE(c.eval.fronthaul, cfg.fronthaul_budget * (1 + 1e-9));
    EXPECT_FALSE(c.unconstrained);
    // deterministic policies jump in fronthaul; a slightly cheaper price must overrun
    const RviResult below = solve_mdp(sp, c.eta * (1 - 3e-3), {});
    EXPECT_GT(evaluate_policy(sp, below.policy).fronthaul, cfg.fronthaul_budget);
  }
  const SystemConfig loose = small_config(2000.0);
  const Calibration c = calibrate_eta(StateSpace(loose), loose.fronthaul_budget, {});
  EXPECT_TRUE(c.unconstrained);
  EXPECT_EQ(c.eta, 0.0);
}

TEST(Solve, MarkovArrivalsKeepMemory) {
  SystemConfig cfg = small_config();
  cfg.energy.law = MarkovArrivals{{0.0, 8.0, 16.0}, {{0.6, 0.4, 0.0}, {0.2, 0.6, 0.2}, {0.0, 0.5, 0.5}}, {1, 0, 0}};
  const StateSpace sp(cfg);
  EXPECT_EQ(sp.memory_levels(), 3u);
  RviParams p;
  p.tolerance = 1e-10;
  const RviResult a = solve_mdp(sp, 1e-4, p);
  p.reference = reference_state(sp);
  const RviResult b = relative_value_iteration(explicit_mdp(sp, 1e-4), p);
  EXPECT_NEAR(a.gain, b.gain, 1e-8);
  const PolicyEvaluation ev = evaluate_policy(sp, a.policy);
  EXPECT_NEAR(ev.rate - 1e-4 * ev.fronthaul, a.gain, 1e-7);

  // last slot of the epoch: every channel branch draws from the row of the remembered arrival
  for (std::size_t y = 0; y < 3; ++y) {
    MdpState s;
    s.battery = 0;
    s.memory = y;
    s.channel = 3;
    s.block = static_cast<std::size_t>(cfg.blocks_per_epoch) - 1;
    s.slot = static_cast<std::size_t>(cfg.slots_per_block) - 1;
    std::vector<double> marginal(3, 0.0);
    for (const auto& [j, q] : transition(sp, s, {})) marginal[sp.state(j).arrival] += q;
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(marginal[k], sp.next_arrival(y)[k], 1e-12) << y << " " << k;
  }
}

TEST(PolicyCsv, OneRowPerState) {
  const StateSpace sp(small_config());
  const RviResult r = solve_mdp(sp, 0.0, {});
  const std::string csv = policy_csv(sp, r.policy);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), sp.size() + 1);
}

}  // namespace
}  // namespace ffsplit
