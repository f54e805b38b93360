#include "ffsplit/closedform.hpp"

#include <cmath>
#include <stdexcept>

namespace ffsplit {

namespace {

// (1+x) log(1+x) - x, accurate near zero.
double glue_lhs(double x) { return (1.0 + x) * std::log1p(x) - x; }

SingleEpochPolicy make_policy(std::size_t modes) {
  SingleEpochPolicy p;
  p.durations.assign(modes, 0.0);
  p.powers.assign(modes, 0.0);
  return p;
}

void finish(SingleEpochPolicy& pol, double gain, double max_power) {
  pol.throughput = 0.0;
  for (std::size_t x = 0; x < pol.durations.size(); ++x) {
    if (pol.durations[x] <= 0.0) {
      pol.durations[x] = 0.0;
      pol.powers[x] = 0.0;
      continue;
    }
    if (pol.powers[x] > max_power) {
      pol.powers[x] = max_power;
      pol.power_capped = true;
    }
    pol.powers[x] = std::max(pol.powers[x], 0.0);
    pol.throughput += pol.durations[x] * std::log1p(gain * pol.powers[x]);
  }
}

}  // namespace

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Idle: return "idle";
    case Regime::GlueBurst: return "glue-burst";
    case Regime::FullHorizon: return "full-horizon";
    case Regime::FronthaulMode1: return "fronthaul-mode1";
    case Regime::MixedAtV3: return "mixed-v3";
    case Regime::MixedFullHorizon: return "mixed-full-horizon";
    case Regime::FronthaulMode2: return "fronthaul-mode2";
  }
  return "unknown";
}

double glue_pour_power(double gain, double processing_power) {
  if (!(gain > 0.0) || !(processing_power >= 0.0)) {
    throw std::invalid_argument("glue_pour_power: need gain > 0 and processing power >= 0");
  }
  if (processing_power == 0.0) return 0.0;
  const double target = gain * processing_power;
  double lo = 0.0;
  double hi = 1.0;
  while (glue_lhs(gain * hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (glue_lhs(gain * mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double mixed_processing_power(const SplitMode& m1, const SplitMode& m2) {
  const double dr = m1.fronthaul_rate - m2.fronthaul_rate;
  return m2.processing_power + m2.fronthaul_rate * (m2.processing_power - m1.processing_power) / dr;
}

double v3_power(double gain, const SplitMode& m1, const SplitMode& m2) {
  if (!(m1.fronthaul_rate > m2.fronthaul_rate)) throw std::invalid_argument("v3_power: need R1 > R2");
  return glue_pour_power(gain, mixed_processing_power(m1, m2));
}

SingleEpochPolicy single_mode_policy(double energy, double horizon, double gain, double budget,
                                     const SplitMode& mode, double max_power) {
  auto pol = make_policy(1);
  if (!(energy > 0.0) || !(horizon > 0.0) || !(budget > 0.0)) return pol;
  const double eps = mode.processing_power;
  const double cap = std::min(budget * horizon / mode.fronthaul_rate, horizon);
  const double v = glue_pour_power(gain, eps);
  if (energy < cap * (v + eps)) {
    pol.durations[0] = energy / (v + eps);
    pol.powers[0] = v;
    pol.regime = Regime::GlueBurst;
  } else {
    pol.durations[0] = cap;
    pol.powers[0] = energy / cap - eps;
    pol.regime = cap < horizon ? Regime::FronthaulMode1 : Regime::FullHorizon;
  }
  finish(pol, gain, max_power);
  return pol;
}

SingleEpochPolicy single_epoch_policy(const SingleEpochProblem& prob) {
  const auto& m1 = prob.mode1;
  const auto& m2 = prob.mode2;
  if (!(m1.fronthaul_rate > m2.fronthaul_rate) || !(m1.processing_power < m2.processing_power)) {
    throw std::invalid_argument("single_epoch_policy: need R1 > R2 and eps1 < eps2");
  }
  auto pol = make_policy(2);
  const double E = prob.energy;
  const double T = prob.horizon;
  const double D = prob.budget;
  const double g = prob.gain;
  if (!(E > 0.0) || !(T > 0.0) || !(D > 0.0)) return pol;

  const double R1 = m1.fronthaul_rate;
  const double R2 = m2.fronthaul_rate;
  const double e1 = m1.processing_power;
  const double e2 = m2.processing_power;

  if (D >= R1) {
    auto single = single_mode_policy(E, T, g, D, m1, prob.max_power);
    pol.durations[0] = single.durations[0];
    pol.powers[0] = single.powers[0];
    pol.regime = single.regime;
    pol.power_capped = single.power_capped;
    finish(pol, g, prob.max_power);
    return pol;
  }

  const double v1 = glue_pour_power(g, e1);
  const double v3 = v3_power(g, m1, m2);
  const double DT = D * T;

  auto set_mode1_glue = [&] {
    pol.durations[0] = E / (v1 + e1);
    pol.powers[0] = v1;
    pol.regime = Regime::GlueBurst;
  };
  auto set_mode1_pinned = [&] {
    pol.durations[0] = DT / R1;
    pol.powers[0] = E * R1 / DT - e1;
    pol.regime = Regime::FronthaulMode1;
  };
  auto set_mixed_v3 = [&] {
    const double den = R1 * (v3 + e2) - R2 * (v3 + e1);
    pol.durations[0] = ((v3 + e2) * DT - R2 * E) / den;
    pol.durations[1] = (R1 * E - (v3 + e1) * DT) / den;
    pol.powers[0] = pol.powers[1] = v3;
    pol.regime = Regime::MixedAtV3;
  };

  const double edge_a = DT * (v1 + e1) / R1;
  const double edge_b = DT * (v3 + e1) / R1;

  if (D > R2) {
    const double dr = R1 - R2;
    const double edge_c = T * v3 + (DT * (e1 - e2) + (R1 * e2 - R2 * e1) * T) / dr;
    if (E <= edge_a) {
      set_mode1_glue();
    } else if (E <= edge_b) {
      set_mode1_pinned();
    } else if (E <= edge_c) {
      set_mixed_v3();
    } else {
      pol.durations[0] = (DT - R2 * T) / dr;
      pol.durations[1] = (R1 * T - DT) / dr;
      const double p = E / T - D * (e1 - e2) / dr - (R1 * e2 - R2 * e1) / dr;
      pol.powers[0] = pol.powers[1] = p;
      pol.regime = Regime::MixedFullHorizon;
    }
  } else {
    const double edge_c = DT * (v3 + e2) / R2;
    if (E <= edge_a) {
      set_mode1_glue();
    } else if (E <= edge_b) {
      set_mode1_pinned();
    } else if (E <= edge_c) {
      set_mixed_v3();
    } else {
      pol.durations[1] = DT / R2;
      pol.powers[1] = E * R2 / DT - e2;
      pol.regime = Regime::FronthaulMode2;
    }
  }
  finish(pol, g, prob.max_power);
  return pol;
}

SingleEpochPolicy best_pair_policy(double energy, double horizon, double gain, double budget,
                                   const ModeCatalog& catalog, double max_power) {
  const std::size_t X = catalog.size();
  auto best = make_policy(X);
  bool have = false;
  auto consider = [&](const SingleEpochPolicy& cand, std::size_t i, std::size_t j, bool pair) {
    if (have && !(cand.throughput > best.throughput * (1.0 + 1e-12))) return;
    auto out = make_policy(X);
    out.durations[i] = cand.durations[0];
    out.powers[i] = cand.powers[0];
    if (pair) {
      out.durations[j] = cand.durations[1];
      out.powers[j] = cand.powers[1];
    }
    out.throughput = cand.throughput;
    out.regime = cand.regime;
    out.power_capped = cand.power_capped;
    best = std::move(out);
    have = true;
  };
  for (std::size_t i = 0; i < X; ++i) {
    for (std::size_t j = i + 1; j < X; ++j) {
      SingleEpochProblem prob{energy, horizon, gain, budget, catalog[i], catalog[j], max_power};
      consider(single_epoch_policy(prob), i, j, true);
    }
  }
  for (std::size_t i = 0; i < X; ++i) {
    consider(single_mode_policy(energy, horizon, gain, budget, catalog[i], max_power), i, i, false);
  }
  return best;
}

}  // namespace ffsplit
