#include "ffsplit/offline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ffsplit {

void OfflineInstance::validate() const {
  validate_config(cfg);
  if (energy.empty()) throw ConfigError("energy", "need at least one epoch");
  if (gains.size() != energy.size()) throw ConfigError("channel", "one gain row per epoch");
  for (std::size_t m = 0; m < energy.size(); ++m) {
    const std::string at = "[" + std::to_string(m) + "]";
    if (!(energy[m] >= 0.0) || energy[m] > cfg.battery_capacity * (1.0 + 1e-12)) {
      throw ConfigError("energy" + at, "must lie in [0, battery capacity]");
    }
    if (gains[m].size() != blocks()) throw ConfigError("channel" + at, "one gain per block");
    for (double g : gains[m]) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("channel" + at, "gains must be positive");
    }
  }
}

double OfflineResiduals::worst() const {
  return std::max({fronthaul, causality, battery, block_length, -negativity});
}

BlockAllocation OfflineSolution::block(std::size_t m, std::size_t n) const {
  BlockAllocation a(modes);
  for (std::size_t x = 0; x < modes; ++x) {
    a.durations[x] = duration(m, n, x);
    a.powers[x] = power(m, n, x);
  }
  return a;
}

double OfflineSolution::epoch_energy(std::size_t m) const {
  double e = 0.0;
  for (std::size_t n = 0; n < blocks; ++n) e += block(m, n).energy(catalog);
  return e;
}

double OfflineSolution::fronthaul_total() const {
  double f = 0.0;
  for (std::size_t m = 0; m < epochs; ++m)
    for (std::size_t n = 0; n < blocks; ++n) f += block(m, n).fronthaul(catalog);
  return f;
}

namespace {

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs = 0.0;
};

// Barrier problem over the pairs still in play. Variables: theta and alpha of
// each pair (interleaved), then one battery level per epoch from `first`.
class Barrier {
 public:
  struct Pair {
    std::size_t m, n, x;
    double gain, rate, eps;
  };

  Barrier(const OfflineInstance& inst, std::size_t first, std::vector<Pair> pairs)
      : inst_(inst), first_(first), pairs_(std::move(pairs)) {
    const std::size_t M = inst.epochs();
    const auto& cfg = inst.cfg;
    nb_ = M - first_;
    nv_ = 2 * pairs_.size() + nb_;
    const double L = cfg.slots_per_block;

    Row fh;
    fh.rhs = cfg.fronthaul_budget * static_cast<double>(M * inst.blocks()) * L;
    for (std::size_t k = 0; k < pairs_.size(); ++k) fh.terms.push_back({2 * k, pairs_[k].rate});
    rows_.push_back(fh);

    std::vector<Row> block_rows(M * inst.blocks());
    for (auto& r : block_rows) r.rhs = L;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      block_rows[pairs_[k].m * inst.blocks() + pairs_[k].n].terms.push_back({2 * k, 1.0});
    }
    for (auto& r : block_rows)
      if (!r.terms.empty()) rows_.push_back(std::move(r));

    // consumption of epoch m, as (var, coef) terms
    std::vector<std::vector<std::pair<std::size_t, double>>> use(M);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      use[pairs_[k].m].push_back({2 * k, pairs_[k].eps});
      use[pairs_[k].m].push_back({2 * k + 1, 1.0});
    }
    consume_row_.assign(M, npos);
    carry_row_.assign(M, npos);
    cap_row_.assign(M, npos);
    for (std::size_t m = first_; m < M; ++m) {
      Row c;
      c.terms = use[m];
      c.terms.push_back({battery(m), -1.0});
      consume_row_[m] = rows_.size();
      rows_.push_back(c);
      if (m == first_) {
        rows_.push_back({{{battery(m), 1.0}}, inst.energy[m]});
      }
      if (m + 1 < M) {
        Row carry;
        carry.terms = use[m];
        carry.terms.push_back({battery(m), -1.0});
        carry.terms.push_back({battery(m + 1), 1.0});
        carry.rhs = inst.energy[m + 1];
        carry_row_[m] = rows_.size();
        rows_.push_back(carry);
      }
      cap_row_[m] = rows_.size();
      rows_.push_back({{{battery(m), 1.0}}, cfg.battery_capacity});
    }
  }

  std::size_t battery(std::size_t m) const { return 2 * pairs_.size() + (m - first_); }
  std::size_t vars() const { return nv_; }
  std::size_t constraint_count() const { return rows_.size() + 2 * pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }

  // Strictly feasible start: each epoch spends half of its battery.
  Eigen::VectorXd start() const {
    const auto& cfg = inst_.cfg;
    const double L = cfg.slots_per_block;
    double rate_sum = 0.0;
    for (const auto& m : cfg.catalog.modes) rate_sum += m.fronthaul_rate;
    const double X = static_cast<double>(cfg.catalog.size());
    const double base = std::min(0.5 * L / X, 0.5 * cfg.fronthaul_budget * L / rate_sum);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(nv_);
    const std::size_t M = inst_.epochs();
    std::vector<std::vector<std::size_t>> by_epoch(M);
    for (std::size_t k = 0; k < pairs_.size(); ++k) by_epoch[pairs_[k].m].push_back(k);
    double b = 0.99 * std::min(inst_.energy[first_], cfg.battery_capacity);
    for (std::size_t m = first_; m < M; ++m) {
      z[battery(m)] = b;
      double proc = 0.0;
      for (auto k : by_epoch[m]) proc += base * pairs_[k].eps;
      double theta = base;
      if (proc > 0.25 * b) theta = base * 0.25 * b / proc;
      double total = 0.0;
      proc = 0.0;
      for (auto k : by_epoch[m]) {
        total += theta;
        proc += theta * pairs_[k].eps;
      }
      const double p = total > 0.0 ? (0.5 * b - proc) / total : 0.0;
      for (auto k : by_epoch[m]) {
        z[2 * k] = theta;
        z[2 * k + 1] = theta * p;
      }
      double used = total > 0.0 ? 0.5 * b : 0.0;
      if (m + 1 < M) {
        b = 0.99 * std::min(b - used + inst_.energy[m + 1], cfg.battery_capacity);
      }
    }
    return z;
  }

  double objective(const Eigen::VectorXd& z) const {
    double f = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const double th = z[2 * k], al = z[2 * k + 1];
      if (th > 0.0) f += th * std::log1p(pairs_[k].gain * al / th);
    }
    return f;
  }

  // Slacks of the linear rows; false if any is not strictly positive.
  bool slacks(const Eigen::VectorXd& z, Eigen::VectorXd& s) const {
    s.resize(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double v = rows_[i].rhs;
      for (auto [j, a] : rows_[i].terms) v -= a * z[j];
      s[i] = v;
      if (!(v > 0.0)) return false;
    }
    for (std::size_t j = 0; j < 2 * pairs_.size(); ++j)
      if (!(z[j] > 0.0)) return false;
    return true;
  }

  double merit(const Eigen::VectorXd& z, double t, bool* ok) const {
    Eigen::VectorXd s;
    if (!slacks(z, s)) {
      *ok = false;
      return std::numeric_limits<double>::infinity();
    }
    *ok = true;
    double phi = -t * objective(z);
    for (Eigen::Index i = 0; i < s.size(); ++i) phi -= std::log(s[i]);
    for (std::size_t j = 0; j < 2 * pairs_.size(); ++j) phi -= std::log(z[j]);
    return phi;
  }

  // One centering pass at fixed t. Returns Newton steps taken.
  int center(Eigen::VectorXd& z, double t, int budget) const {
    int steps = 0;
    Eigen::VectorXd s, g(nv_), dz(nv_);
    Eigen::MatrixXd H(nv_, nv_);
    double last = std::numeric_limits<double>::infinity();
    while (steps < std::min(budget, 100)) {
      slacks(z, s);
      g.setZero();
      H.setZero();
      for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const double th = z[2 * k], al = z[2 * k + 1], gam = pairs_[k].gain;
        const double u = gam * al / th;
        g[2 * k] -= t * (std::log1p(u) - u / (1.0 + u));
        g[2 * k + 1] -= t * gam / (1.0 + u);
        const double c = t / (th * (1.0 + u) * (1.0 + u));
        H(2 * k, 2 * k) += c * u * u;
        H(2 * k, 2 * k + 1) -= c * gam * u;
        H(2 * k + 1, 2 * k) -= c * gam * u;
        H(2 * k + 1, 2 * k + 1) += c * gam * gam;
        g[2 * k] -= 1.0 / th;
        g[2 * k + 1] -= 1.0 / al;
        H(2 * k, 2 * k) += 1.0 / (th * th);
        H(2 * k + 1, 2 * k + 1) += 1.0 / (al * al);
      }
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double inv = 1.0 / s[i], inv2 = inv * inv;
        const auto& terms = rows_[i].terms;
        for (auto [j, a] : terms) {
          g[j] += a * inv;
          for (auto [l, b] : terms) H(j, l) += a * b * inv2;
        }
      }
      // symmetric diagonal scaling keeps the factorization well conditioned
      Eigen::VectorXd d = H.diagonal().cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
      Eigen::LLT<Eigen::MatrixXd> llt(Hs);
      if (llt.info() != Eigen::Success) {
        Hs.diagonal().array() += 1e-12;
        llt.compute(Hs);
        if (llt.info() != Eigen::Success) throw std::runtime_error("offline: Newton system not positive definite");
      }
      dz = -(d.asDiagonal() * llt.solve(d.asDiagonal() * g));
      const double decrement = -g.dot(dz);
      ++steps;
      if (decrement < 1e-14) break;
      // inside the quadratic region the merit test drowns in rounding at
      // large t; take pure Newton steps until the decrement stops shrinking
      if (decrement < 1e-2) {
        if (decrement > 0.5 * last) break;
        last = decrement;
      }

      // largest step that keeps every slack positive
      double smax = 1.0;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        double ad = 0.0;
        for (auto [j, a] : rows_[i].terms) ad += a * dz[j];
        if (ad > 0.0) smax = std::min(smax, 0.99 * s[i] / ad);
      }
      for (std::size_t j = 0; j < 2 * pairs_.size(); ++j)
        if (dz[j] < 0.0) smax = std::min(smax, -0.99 * z[j] / dz[j]);

      if (decrement < 1e-2) {
        z += std::min(1.0, smax) * dz;
        continue;
      }
      bool ok = false;
      const double phi0 = merit(z, t, &ok);
      double step = smax;
      Eigen::VectorXd trial;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = z + step * dz;
        const double phi = merit(trial, t, &ok);
        if (ok && phi <= phi0 - 0.01 * step * decrement) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // rounding noise at large t: accept any feasible non-increasing point
        trial = z + step * dz;
        if (merit(trial, t, &ok) <= phi0 && ok) z = trial;
        break;
      }
      z = trial;
    }
    return steps;
  }

  Eigen::VectorXd multipliers(const Eigen::VectorXd& z, double t) const {
    Eigen::VectorXd s;
    slacks(z, s);
    return (t * s.array()).inverse();
  }

  std::size_t consume_row(std::size_t m) const { return consume_row_[m]; }
  std::size_t carry_row(std::size_t m) const { return carry_row_[m]; }
  std::size_t cap_row(std::size_t m) const { return cap_row_[m]; }
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  const OfflineInstance& inst_;
  std::size_t first_;
  std::vector<Pair> pairs_;
  std::size_t nb_ = 0, nv_ = 0;
  std::vector<Row> rows_;
  std::vector<std::size_t> consume_row_, carry_row_, cap_row_;
};

OfflineSolution empty_solution(const OfflineInstance& inst) {
  OfflineSolution sol;
  sol.epochs = inst.epochs();
  sol.blocks = inst.blocks();
  sol.modes = inst.cfg.catalog.size();
  sol.catalog = inst.cfg.catalog;
  sol.slots_per_block = inst.cfg.slots_per_block;
  sol.budget = inst.cfg.fronthaul_budget;
  const std::size_t cells = sol.epochs * sol.blocks * sol.modes;
  sol.durations.assign(cells, 0.0);
  sol.powers.assign(cells, 0.0);
  for (const auto& row : inst.gains) sol.gains.insert(sol.gains.end(), row.begin(), row.end());
  sol.energy_price.assign(sol.epochs, 0.0);
  sol.causality_multiplier.assign(sol.epochs, 0.0);
  sol.battery_multiplier.assign(sol.epochs, 0.0);
  sol.battery_level.assign(sol.epochs, 0.0);
  sol.waste.assign(sol.epochs, 0.0);
  return sol;
}

// Physical battery replay, waste and constraint residuals of the final plan.
void account(OfflineSolution& sol, const OfflineInstance& inst) {
  const std::size_t M = sol.epochs;
  const double Bmax = inst.cfg.battery_capacity;
  const double L = inst.cfg.slots_per_block;
  double b = 0.0, cum_e = 0.0, cum_c = 0.0, cum_w = 0.0;
  auto& r = sol.residuals;
  r = OfflineResiduals{};
  for (std::size_t m = 0; m < M; ++m) {
    b = std::min(b + inst.energy[m], Bmax);
    sol.battery_level[m] = b;
    cum_e += inst.energy[m];
    const double c = sol.epoch_energy(m);
    cum_c += c;
    r.causality = std::max(r.causality, (cum_c - cum_e) / (1.0 + cum_e));
    b -= c;
    if (m + 1 < M) {
      const double next = b + inst.energy[m + 1];
      sol.waste[m] = std::max(0.0, next - Bmax);
      cum_w += sol.waste[m];
      r.battery = std::max(r.battery, (cum_e + inst.energy[m + 1] - cum_c - cum_w - Bmax) / (1.0 + Bmax));
    }
    for (std::size_t n = 0; n < sol.blocks; ++n) {
      double used = 0.0;
      for (std::size_t x = 0; x < sol.modes; ++x) {
        const double th = sol.duration(m, n, x);
        used += th;
        r.negativity = std::min({r.negativity, th, th * sol.power(m, n, x)});
      }
      r.block_length = std::max(r.block_length, used - L);
    }
  }
  const double avg = sol.fronthaul_total() / (static_cast<double>(M * sol.blocks) * L);
  const double D = inst.cfg.fronthaul_budget;
  r.fronthaul = std::max(0.0, D > 0.0 ? (avg - D) / D : avg);
  sol.throughput = 0.0;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < sol.blocks; ++n) sol.throughput += sol.block(m, n).throughput(sol.gain(m, n));
}

}  // namespace

OfflineSolution solve_offline(const OfflineInstance& inst, const OfflineOptions& opts) {
  inst.validate();
  auto sol = empty_solution(inst);
  const std::size_t M = inst.epochs(), N = inst.blocks(), X = inst.cfg.catalog.size();

  std::size_t first = 0;
  while (first < M && inst.energy[first] <= 0.0) ++first;
  if (first == M || inst.cfg.fronthaul_budget <= 0.0) {
    sol.converged = true;
    account(sol, inst);
    return sol;
  }

  std::vector<Barrier::Pair> pairs;
  for (std::size_t m = first; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t x = 0; x < X; ++x) {
        const auto& mode = inst.cfg.catalog[x];
        pairs.push_back({m, n, x, inst.gains[m][n], mode.fronthaul_rate, mode.processing_power});
      }

  auto bp = std::make_unique<Barrier>(inst, first, pairs);
  Eigen::VectorXd z = bp->start();
  double t = 1.0;
  int steps = 0;
  const int cap = opts.max_newton_steps;
  auto run_path = [&](double gap_target) {
    while (steps < cap) {
      steps += bp->center(z, t, cap - steps);
      const double f = bp->objective(z);
      const double gap = static_cast<double>(bp->constraint_count()) / t;
      if (gap < gap_target * (1.0 + std::abs(f))) return true;
      t *= 10.0;
    }
    return false;
  };

  bool converged = run_path(opts.gap_tolerance);

  // Drop pairs the barrier has pushed to the boundary and re-centre the rest
  // so the survivors' powers are not polluted by barrier remnants.
  for (int round = 0; round < 3 && converged; ++round) {
    const auto& cur = bp->pairs();
    std::vector<double> epoch_max(M, 0.0);
    for (std::size_t k = 0; k < cur.size(); ++k) epoch_max[cur[k].m] = std::max(epoch_max[cur[k].m], z[2 * k]);
    std::vector<Barrier::Pair> keep;
    std::vector<std::size_t> keep_idx;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      if (z[2 * k] >= 1e-5 * epoch_max[cur[k].m] && z[2 * k] >= opts.zero_threshold) {
        keep.push_back(cur[k]);
        keep_idx.push_back(k);
      }
    }
    if (keep.size() == cur.size()) break;
    auto next = std::make_unique<Barrier>(inst, first, keep);
    Eigen::VectorXd nz(next->vars());
    for (std::size_t i = 0; i < keep_idx.size(); ++i) {
      nz[2 * i] = z[2 * keep_idx[i]];
      nz[2 * i + 1] = z[2 * keep_idx[i] + 1];
    }
    for (std::size_t m = first; m < M; ++m) nz[next->battery(m)] = z[bp->battery(m)];
    bp = std::move(next);
    z = nz;
    t /= 100.0;
    converged = run_path(opts.gap_tolerance);
  }

  sol.converged = converged;
  sol.newton_steps = steps;
  sol.duality_gap = static_cast<double>(bp->constraint_count()) / t;
  const auto& fin = bp->pairs();
  for (std::size_t k = 0; k < fin.size(); ++k) {
    const double th = z[2 * k];
    if (th < opts.zero_threshold) continue;
    const auto idx = sol.index(fin[k].m, fin[k].n, fin[k].x);
    sol.durations[idx] = th;
    sol.powers[idx] = z[2 * k + 1] / th;
  }

  const Eigen::VectorXd lam = bp->multipliers(z, t);
  sol.fronthaul_multiplier = lam[0] * static_cast<double>(M * N) * inst.cfg.slots_per_block;
  double comp = 0.0;
  Eigen::VectorXd s;
  bp->slacks(z, s);
  for (Eigen::Index i = 0; i < s.size(); ++i) comp = std::max(comp, lam[i] * s[i]);
  // Slack-based multipliers lose relative precision as the slacks shrink, so
  // the epoch price is re-estimated from the power stationarity of the pairs
  // in use: gamma / (1 + gamma p) + 1/(t alpha) = price.
  const auto& fin_pairs = bp->pairs();
  std::vector<double> num(M, 0.0), den(M, 0.0);
  for (std::size_t k = 0; k < fin_pairs.size(); ++k) {
    const double th = z[2 * k], al = z[2 * k + 1];
    if (th <= opts.select_threshold) continue;
    const double gam = fin_pairs[k].gain;
    num[fin_pairs[k].m] += al * (gam / (1.0 + gam * al / th) + 1.0 / (t * al));
    den[fin_pairs[k].m] += al;
  }
  for (std::size_t m = first; m < M; ++m) {
    const double kappa = lam[bp->consume_row(m)];
    const double sigma = bp->carry_row(m) == Barrier::npos ? 0.0 : lam[bp->carry_row(m)];
    sol.energy_price[m] = den[m] > 0.0 ? num[m] / den[m] : kappa + sigma;
  }
  // price_m = sum_{j >= m} (mu_j - nu_j); each multiplier is nonnegative and
  // at most one of mu_m, nu_m is active.
  for (std::size_t m = 0; m < M; ++m) {
    const double next = m + 1 < M ? sol.energy_price[m + 1] : 0.0;
    sol.causality_multiplier[m] = std::max(0.0, sol.energy_price[m] - next);
    sol.battery_multiplier[m] = std::max(0.0, next - sol.energy_price[m]);
  }
  account(sol, inst);
  sol.residuals.complementarity = std::max(comp, 1.0 / t);
  if (!converged) {
    std::ostringstream os;
    os << "offline: barrier did not converge after " << steps << " Newton steps (worst residual "
       << sol.residuals.worst() << ")";
    throw std::runtime_error(os.str());
  }
  return sol;
}

double kkt_power_residual(const OfflineSolution& sol, double select_threshold) {
  double worst = 0.0;
  for (std::size_t m = 0; m < sol.epochs; ++m) {
    const double price = sol.energy_price[m];
    for (std::size_t n = 0; n < sol.blocks; ++n)
      for (std::size_t x = 0; x < sol.modes; ++x) {
        if (sol.duration(m, n, x) <= select_threshold) continue;
        const double ideal = 1.0 / price - 1.0 / sol.gain(m, n);
        worst = std::max(worst, std::abs(sol.power(m, n, x) - ideal));
      }
  }
  return worst;
}

std::string StructureViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::UnequalPowerInBlock: os << "unequal powers in block"; break;
    case Kind::TooManyModesInEpoch: os << "more than two modes in epoch"; break;
    case Kind::UnequalWaterLevel: os << "unequal water level in epoch"; break;
  }
  os << " (epoch " << epoch << ", block " << block << ", magnitude " << magnitude << ")";
  return os.str();
}

bool collinear_modes(const SplitMode& a, const SplitMode& b, const SplitMode& c, double rel) {
  // slopes (eps_j - eps_i) / (R_i - R_j) of the two chords through a
  const double s1 = (b.processing_power - a.processing_power) / (a.fronthaul_rate - b.fronthaul_rate);
  const double s2 = (c.processing_power - a.processing_power) / (a.fronthaul_rate - c.fronthaul_rate);
  return std::abs(s1 - s2) <= rel * std::max(std::abs(s1), std::abs(s2));
}

StructureReport verify_structure(const OfflineSolution& sol, const StructureTolerances& tol) {
  StructureReport rep;
  rep.collinear_exempt.assign(sol.epochs, false);
  using Kind = StructureViolation::Kind;
  for (std::size_t m = 0; m < sol.epochs; ++m) {
    std::vector<std::size_t> used;
    for (std::size_t x = 0; x < sol.modes; ++x) {
      double total = 0.0;
      for (std::size_t n = 0; n < sol.blocks; ++n) total += sol.duration(m, n, x);
      if (total > tol.select) used.push_back(x);
    }
    if (used.size() > 2) {
      bool collinear = true;
      for (std::size_t i = 2; i < used.size() && collinear; ++i) {
        collinear = collinear_modes(sol.catalog[used[0]], sol.catalog[used[1]], sol.catalog[used[i]]);
      }
      if (collinear) {
        rep.collinear_exempt[m] = true;
      } else {
        rep.violations.push_back({Kind::TooManyModesInEpoch, m, 0, static_cast<double>(used.size())});
      }
    }
    double lo_level = std::numeric_limits<double>::infinity(), hi_level = -lo_level;
    std::size_t hi_block = 0;
    for (std::size_t n = 0; n < sol.blocks; ++n) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t x = 0; x < sol.modes; ++x) {
        if (sol.duration(m, n, x) <= tol.select) continue;
        lo = std::min(lo, sol.power(m, n, x));
        hi = std::max(hi, sol.power(m, n, x));
        const double level = sol.power(m, n, x) + 1.0 / sol.gain(m, n);
        lo_level = std::min(lo_level, level);
        if (level > hi_level) {
          hi_level = level;
          hi_block = n;
        }
      }
      if (hi > lo + tol.power) rep.violations.push_back({Kind::UnequalPowerInBlock, m, n, hi - lo});
    }
    if (hi_level > lo_level + tol.level) {
      rep.violations.push_back({Kind::UnequalWaterLevel, m, hi_block, hi_level - lo_level});
    }
  }
  return rep;
}

}  // namespace ffsplit
