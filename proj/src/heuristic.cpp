#include "ffsplit/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffsplit/closedform.hpp"

namespace ffsplit {

HeuristicParams heuristic_params(const SystemConfig& cfg) {
  HeuristicParams p;
  const std::size_t G = cfg.channel.size();
  p.good_from = cfg.heuristic.good_from >= 0 ? static_cast<std::size_t>(cfg.heuristic.good_from) : G / 2;
  p.lookahead = cfg.heuristic.lookahead_blocks > 0 ? static_cast<std::size_t>(cfg.heuristic.lookahead_blocks)
                                                   : 2 * static_cast<std::size_t>(cfg.blocks_per_epoch);
  p.budget = cfg.fronthaul_budget;
  return p;
}

std::vector<double> expected_state_counts(const ChannelChain& chain, std::size_t current, std::size_t horizon) {
  const std::size_t G = chain.size();
  std::vector<double> out(G, 0.0);
  if (horizon == 0) return out;
  const auto& q = chain.transitions;
  // pr[c * G + w] = Pr{n, n_v = c, w}
  std::vector<double> pr, next;
  for (std::size_t v = 0; v < G; ++v) {
    pr.assign((horizon + 1) * G, 0.0);
    pr[(current == v ? 1 : 0) * G + current] = 1.0;
    for (std::size_t n = 1; n < horizon; ++n) {
      next.assign(pr.size(), 0.0);
      for (std::size_t c = 0; c < n + 1; ++c)
        for (std::size_t w = 0; w < G; ++w) {
          const double p = pr[c * G + w];
          if (p == 0.0) continue;
          for (std::size_t y = 0; y < G; ++y) next[(c + (y == v ? 1 : 0)) * G + y] += p * q[w][y];
        }
      pr.swap(next);
    }
    for (std::size_t c = 1; c <= horizon; ++c)
      for (std::size_t w = 0; w < G; ++w) out[v] += static_cast<double>(c) * pr[c * G + w];
  }
  return out;
}

double good_block_forecast(const ChannelChain& chain, std::size_t current, std::size_t horizon,
                           std::size_t good_from) {
  const auto counts = expected_state_counts(chain, current, horizon);
  double n = 0.0;
  for (std::size_t v = good_from; v < counts.size(); ++v) n += counts[v];
  return n;
}

int BlockPlan::total() const { return std::accumulate(slots.begin(), slots.end(), 0); }

double BlockPlan::energy(const ModeCatalog& cat) const {
  double e = 0.0;
  for (std::size_t x = 0; x < slots.size(); ++x) e += slots[x] * (power + cat[x].processing_power);
  return e;
}

double BlockPlan::fronthaul(const ModeCatalog& cat) const {
  double f = 0.0;
  for (std::size_t x = 0; x < slots.size(); ++x) f += slots[x] * cat[x].fronthaul_rate;
  return f;
}

BlockPlan heuristic_block_decision(HeuristicState& hs, std::size_t observed, double arrival,
                                   const HeuristicParams& params, const SystemConfig& cfg) {
  const auto L = static_cast<std::size_t>(cfg.slots_per_block);
  const auto N = static_cast<std::size_t>(cfg.blocks_per_epoch);
  const auto& cat = cfg.catalog;
  const std::size_t X = cat.size();
  BlockPlan plan;
  plan.slots.assign(X, 0);

  hs.battery = std::min(hs.battery + arrival, cfg.battery_capacity);
  const std::size_t n = hs.block + 1;
  auto finish = [&] {
    hs.battery = std::max(0.0, hs.battery - plan.energy(cat));
    hs.fronthaul += plan.fronthaul(cat);
    hs.block = n;
    hs.block_in_epoch = (hs.block_in_epoch + 1) % N;
    return plan;
  };
  if (observed < params.good_from || X == 0) return finish();

  const auto counts = expected_state_counts(cfg.channel, observed, N - hs.block_in_epoch);
  double n_good = 0.0, weighted = 0.0;
  for (std::size_t v = params.good_from; v < counts.size(); ++v) {
    n_good += counts[v];
    weighted += counts[v] * cfg.channel.gains[v];
  }
  const double n_heu = good_block_forecast(cfg.channel, observed, params.lookahead, params.good_from);
  const double Ld = static_cast<double>(L);
  plan.gain = weighted / n_good;
  plan.horizon = n_good * Ld;
  plan.allowance = ((static_cast<double>(n + params.lookahead)) * Ld * params.budget - hs.fronthaul) / (n_heu * Ld);
  if (!(plan.allowance > 0.0) || hs.battery <= cat.min_processing()) return finish();

  const auto pol = best_pair_policy(hs.battery, plan.horizon, plan.gain, plan.allowance, cat, cfg.max_power);
  const double theta = std::accumulate(pol.durations.begin(), pol.durations.end(), 0.0);
  if (!(theta > 0.0)) return finish();

  // this block's share, integerized by largest remainder
  const int k = static_cast<int>(std::floor(std::min(theta, Ld) + 0.5));
  std::vector<int> local(X, 0);
  std::vector<std::pair<double, std::size_t>> rem;
  int given = 0;
  double p_plan = 0.0;
  for (std::size_t x = 0; x < X; ++x) {
    const double share = k * pol.durations[x] / theta;
    local[x] = static_cast<int>(std::floor(share));
    given += local[x];
    rem.emplace_back(share - local[x], x);
    p_plan += pol.durations[x] * pol.powers[x] / theta;
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; given < k && i < rem.size(); ++i, ++given) ++local[rem[i].second];

  // cumulative fronthaul never exceeds n*L*D: move slots to cheaper-rate
  // modes, or drop them
  const double cap = static_cast<double>(n) * Ld * params.budget - hs.fronthaul;
  auto fh = [&] {
    double f = 0.0;
    for (std::size_t x = 0; x < X; ++x) f += local[x] * cat[x].fronthaul_rate;
    return f;
  };
  while (fh() > cap + 1e-9 * (1.0 + std::abs(cap))) {
    std::size_t x = 0;
    while (x < X && local[x] == 0) ++x;
    if (x == X) break;
    --local[x];
    if (x + 1 < X && fh() + cat[x + 1].fronthaul_rate <= cap + 1e-9 * (1.0 + std::abs(cap))) ++local[x + 1];
  }

  // affordability: one power for every slot of the block
  auto processing = [&] {
    double e = 0.0;
    for (std::size_t x = 0; x < X; ++x) e += local[x] * cat[x].processing_power;
    return e;
  };
  int slots = std::accumulate(local.begin(), local.end(), 0);
  while (slots > 0 && hs.battery - processing() <= 0.0) {
    std::size_t x = X;
    while (local[x - 1] == 0) --x;
    --local[x - 1];
    --slots;
  }
  if (slots == 0) return finish();
  plan.power = std::min({p_plan, cfg.max_power, (hs.battery - processing()) / slots});
  if (!(plan.power > 0.0)) return finish();
  plan.slots = local;
  plan.planned_energy = plan.energy(cat);
  return finish();
}

}  // namespace ffsplit
