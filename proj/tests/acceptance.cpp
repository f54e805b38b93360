// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ffsplit/channel.hpp"
#include "ffsplit/closedform.hpp"
#include "ffsplit/config_io.hpp"
#include "ffsplit/experiment.hpp"
#include "ffsplit/mdp.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/policies.hpp"
#include "ffsplit/sim.hpp"
#include "oracles.hpp"

using namespace ffsplit;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Criterion {
  int id;
  std::string name;
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (notes.size() < 40) notes.push_back("violated: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::vector<Criterion> results;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void report(Criterion c) {
  std::printf("%s [%d] %s\n", c.ok ? "PASS" : "FAIL", c.id, c.name.c_str());
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  results.push_back(std::move(c));
}

// ---------------------------------------------------------------- 1 and 2

struct RandomOffline {
  OfflineInstance inst;
  bool collinear = false;
};

bool collinear_by_slopes(const ModeCatalog& c) {
  const double s1 = (c[1].processing_power - c[0].processing_power) / (c[0].fronthaul_rate - c[1].fronthaul_rate);
  const double s2 = (c[2].processing_power - c[1].processing_power) / (c[1].fronthaul_rate - c[2].fronthaul_rate);
  return std::abs(s1 - s2) <= 1e-9 * std::max(std::abs(s1), std::abs(s2));
}

RandomOffline random_offline(std::mt19937_64& gen, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomOffline r;
  SystemConfig cfg = nominal_config();
  if (k % 2 == 1) {
    // random catalog, every fourth of them collinear
    std::vector<double> R = {500 + 11500 * u(gen), 500 + 11500 * u(gen), 500 + 11500 * u(gen)};
    std::sort(R.rbegin(), R.rend());
    R[1] = std::min(R[1], 0.98 * R[0]);
    R[2] = std::min(R[2], 0.98 * R[1]);
    const double e1 = 0.5 + 3 * u(gen), slope = (0.5 + 4 * u(gen)) / (R[0] - R[2]);
    // per-segment slope factors in [0.6, 1.4] keep processing strictly increasing
    const bool straight = k % 4 == 3;
    const double f1 = straight ? 1.0 : 0.6 + 0.8 * u(gen), f2 = straight ? 1.0 : 0.6 + 0.8 * u(gen);
    const double e2 = e1 + f1 * slope * (R[0] - R[1]), e3 = e2 + f2 * slope * (R[1] - R[2]);
    cfg.catalog.modes = {{1, R[0], e1}, {2, R[1], e2}, {3, R[2], e3}};
  }
  const std::size_t M = 1 + gen() % 4, N = 1 + gen() % 4;
  cfg.blocks_per_epoch = static_cast<int>(N);
  cfg.fronthaul_budget = (0.05 + 1.05 * u(gen)) * cfg.catalog[0].fronthaul_rate;
  r.inst.cfg = cfg;
  r.inst.energy.resize(M);
  r.inst.gains.assign(M, std::vector<double>(N));
  for (auto& e : r.inst.energy) e = 100.0 * u(gen);
  for (auto& row : r.inst.gains)
    for (auto& g : row) g = 0.2 + 4.8 * u(gen);
  r.collinear = collinear_by_slopes(cfg.catalog);
  return r;
}

void criteria_1_2() {
  Criterion c1{1, "per-block equal powers and per-epoch water level of the offline optimum"};
  Criterion c2{2, "at most two split modes per epoch in the offline optimum"};
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  const double sel = 1e-6, tol = 1e-4;
  double worst_block = 0.0, worst_level = 0.0;
  int collinear = 0, max_modes = 0;
  for (int k = 0; k < 100; ++k) {
    const auto ri = random_offline(gen, k);
    OfflineSolution sol;
    try {
      sol = solve_offline(ri.inst);
    } catch (const std::exception& e) {
      c1.check(false, fmt("instance %d: %s", k, e.what()));
      c2.check(false, fmt("instance %d: %s", k, e.what()));
      continue;
    }
    collinear += ri.collinear;
    for (std::size_t m = 0; m < sol.epochs; ++m) {
      std::vector<bool> used(sol.modes, false);
      double level = -1.0;
      for (std::size_t n = 0; n < sol.blocks; ++n) {
        double p0 = -1.0;
        for (std::size_t x = 0; x < sol.modes; ++x) {
          if (sol.duration(m, n, x) <= sel) continue;
          used[x] = true;
          const double p = sol.power(m, n, x);
          if (p0 < 0) p0 = p;
          worst_block = std::max(worst_block, std::abs(p - p0));
          c1.check(std::abs(p - p0) <= tol, fmt("instance %d epoch %zu block %zu: powers %.6g vs %.6g", k, m, n, p, p0));
          const double w = p + 1.0 / ri.inst.gains[m][n];
          if (level < 0) level = w;
          worst_level = std::max(worst_level, std::abs(w - level));
          c1.check(std::abs(w - level) <= tol, fmt("instance %d epoch %zu: levels %.6g vs %.6g", k, m, w, level));
        }
      }
      const int count = static_cast<int>(std::count(used.begin(), used.end(), true));
      if (!ri.collinear) {
        max_modes = std::max(max_modes, count);
        c2.check(count <= 2, fmt("instance %d epoch %zu uses %d modes", k, m, count));
      }
    }
  }
  const double secs = since(t0);
  c1.check(secs < 60.0, fmt("runtime %.1f s >= 60 s", secs));
  c1.note(fmt("100 instances, M,N <= 4, X = 3; worst in-block power gap %.2e, worst level gap %.2e (tol 1e-4); %.1f s",
              worst_block, worst_level, secs));
  c2.note(fmt("%d collinear catalogs excluded; max modes per epoch elsewhere %d", collinear, max_modes));
  report(std::move(c1));
  report(std::move(c2));
}

// ---------------------------------------------------------------- 3

void criterion_3() {
  Criterion c{3, "closed-form single-epoch policy vs brute-force grid; continuity at regime boundaries"};
  const auto t0 = Clock::now();
  const auto cat = nominal_mode_table();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> uE(0.2, 120.0), uD(0.02, 1.15), ug(0.2, 5.0), uT(1.0, 16.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    // alternate the three adjacent pairs of the nominal catalog
    const SplitMode& m1 = cat[i % 3 == 2 ? 1 : 0];
    const SplitMode& m2 = cat[i % 3 == 0 ? 1 : 2];
    const double E = uE(gen), T = std::round(uT(gen)), g = ug(gen), D = uD(gen) * m1.fronthaul_rate;
    const auto pol = single_epoch_policy({E, T, g, D, m1, m2, 20.0});
    const double ref = oracle::grid_two_mode(E, T, g, D, m1, m2, 20.0);
    const double rel = std::abs(pol.throughput - ref) / std::max(ref, 1e-12);
    worst = std::max(worst, ref > 1e-12 ? rel : 0.0);
    c.check(ref <= 1e-12 ? pol.throughput <= 1e-9 : rel <= 1e-3,
            fmt("E=%.4g T=%g g=%.4g D=%.4g: %.8g vs grid %.8g", E, T, g, D, pol.throughput, ref));
  }
  int edges = 0;
  double worst_jump = 0.0;
  for (double g : quantile_gains(2.0, 4))
    for (double Dfrac : {0.1, 0.3, 0.6, 0.9, 1.2}) {
      const double T = 8.0, D = Dfrac * cat[0].fronthaul_rate;
      auto at = [&](double E) { return single_epoch_policy({E, T, g, D, cat[0], cat[1], 1e9}); };
      Regime prev = at(0.02).regime;
      double prevE = 0.02;
      for (double E = 0.04; E < 250.0; E += 0.02) {
        const auto pol = at(E);
        if (pol.regime != prev) {
          double lo = prevE, hi = E;
          for (int k = 0; k < 60; ++k) {
            const double mid = 0.5 * (lo + hi);
            (at(mid).regime == prev ? lo : hi) = mid;
          }
          const double below = at(lo - 1e-7).throughput, above = at(hi + 1e-7).throughput;
          const double jump = std::abs(above - below) / std::max(1.0, below);
          worst_jump = std::max(worst_jump, jump);
          ++edges;
          c.check(jump <= 1e-4, fmt("g=%.4g D=%.4g edge at E=%.6g (%s -> %s): jump %.3e", g, D, lo,
                                    std::string(regime_name(prev)).c_str(), std::string(regime_name(pol.regime)).c_str(), jump));
        }
        prev = pol.regime;
        prevE = E;
      }
    }
  const double secs = since(t0);
  c.check(secs < 120.0, fmt("runtime %.1f s >= 120 s", secs));
  c.note(fmt("200 problems, worst relative gap to grid %.2e (tol 1e-3); %d regime edges, worst jump %.2e (tol 1e-4); %.1f s",
             worst, edges, worst_jump, secs));
  report(std::move(c));
}

// ---------------------------------------------------------------- 4

void criterion_4() {
  Criterion c{4, "glue-pouring fixed points: residual, monotone in eps, v3 > v1"};
  double worst = 0.0;
  for (double g : {0.05, 0.2738, 1.0, 2.0, 4.7726, 30.0}) {
    double prev = -1.0;
    for (int i = 0; i < 20; ++i) {
      const double eps = 0.1 * std::pow(1.4, i);
      const double v = glue_pour_power(g, eps);
      const double r = (1 + g * v) * std::log1p(g * v) - g * v - g * eps;
      const double rel = std::abs(r) / (g * eps);
      worst = std::max(worst, rel);
      c.check(rel <= 1e-9, fmt("g=%g eps=%g residual %.3e", g, eps, rel));
      c.check(v > prev, fmt("g=%g: v(%g)=%.10g not above %.10g", g, eps, v, prev));
      prev = v;
    }
  }
  const auto cat = nominal_mode_table();
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  double min_gap = 1e300;
  for (double g : quantile_gains(2.0, 4))
    for (const auto& pr : pairs) {
      const double v1 = glue_pour_power(g, cat[pr[0]].processing_power);
      const double v3 = v3_power(g, cat[pr[0]], cat[pr[1]]);
      min_gap = std::min(min_gap, v3 - v1);
      c.check(v3 > v1, fmt("g=%.4g modes %d,%d: v3 %.8g <= v1 %.8g", g, pr[0] + 1, pr[1] + 1, v3, v1));
    }
  c.note(fmt("worst relative residual %.2e (tol 1e-9), 6 gains x 20 eps; smallest v3 - v1 over quantile gains and mode pairs %.4g",
             worst, min_gap));
  report(std::move(c));
}

// ---------------------------------------------------------------- 5

void criterion_5(const SystemConfig& base) {
  Criterion c{5, "relative value iteration: exact on small MDPs, converges on the nominal model"};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int S = 2 + static_cast<int>(seed % 4), A = 2 + static_cast<int>(seed % 3);
    const auto tiny = oracle::random_tiny_mdp(1000 + seed, S, A);
    FiniteMdp fm;
    fm.states.resize(S);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        FiniteMdp::Choice ch;
        ch.reward = tiny.r[s][a];
        for (int j = 0; j < S; ++j) ch.next.emplace_back(j, tiny.P[s][a][j]);
        fm.states[s].push_back(ch);
      }
    RviParams p;
    p.tolerance = 1e-10;
    const RviResult r = relative_value_iteration(fm, p);
    const double ref = oracle::exhaustive_average_reward(tiny);
    worst = std::max(worst, std::abs(r.gain - ref));
    c.check(r.converged && std::abs(r.gain - ref) <= 1e-6, fmt("mdp %llu: %.10g vs %.10g", (unsigned long long)seed, r.gain, ref));
  }
  c.note(fmt("20 random MDPs (<= 5 states, <= 4 actions): worst |gain - exhaustive| %.2e (tol 1e-6)", worst));
  const StateSpace sp(base);
  RviParams p;
  p.relaxation = base.mdp.relaxation;
  p.tolerance = base.mdp.tolerance;
  p.max_iterations = base.mdp.max_iterations;
  for (double eta : {0.0, 1e-4, 5e-4}) {
    const auto t0 = Clock::now();
    const RviResult r = solve_mdp(sp, eta, p);
    const double omega = p.tolerance * (1 + std::abs(r.gain));
    c.check(r.converged && r.span < omega, fmt("eta=%g: not converged (span %.3e)", eta, r.span));
    c.note(fmt("nominal model, %zu states x %zu actions, eta=%g: %d iterations (cap %d), span %.2e < %.2e, %.2f s",
               sp.size(), sp.action_count(), eta, r.iterations, p.max_iterations, r.span, omega, since(t0)));
  }
  report(std::move(c));
}

// ---------------------------------------------------------------- sweeps

using Rows = std::vector<ResultRow>;

const ResultRow* find(const Rows& rows, double value, const std::string& policy) {
  for (const auto& r : rows)
    if (r.value == value && r.policy == policy) return &r;
  return nullptr;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

ExperimentSpec spec_for(const SystemConfig& base, SweepVariable v, std::vector<double> grid,
                        std::vector<std::string> policies) {
  ExperimentSpec s;
  s.base = base;
  s.variable = v;
  s.grid = std::move(grid);
  s.policies = std::move(policies);
  s.episodes = 40;
  s.horizon = 10000;
  s.offline_episodes = 100;
  s.seed = 1;
  return s;
}

void check_rows(Criterion& c, const Rows& rows) {
  for (const auto& r : rows) c.check(r.error.empty(), r.policy + " at " + std::to_string(r.value) + ": " + r.error);
}

// slope of y on x, and R^2
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  return {cov / vx, vy > 0 ? cov * cov / (vx * vy) : 1.0};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const SystemConfig base = load_config(std::string(FFSPLIT_SOURCE_DIR) + "/configs/nominal.cfg");

  criteria_1_2();
  criterion_3();
  criterion_4();
  criterion_5(base);

  // fronthaul sweep shared by 6, 7, 8 and 9
  const std::vector<double> Dgrid = {50, 100, 150, 250, 360, 500, 700, 1000};
  const std::vector<std::string> dpol = {"offline-upper", "offline-rounded", "mdp", "heuristic",
                                         "offline-upper-fixed-1", "offline-upper-fixed-2", "offline-upper-fixed-3",
                                         "offline-fixed-1", "offline-fixed-2", "offline-fixed-3",
                                         "fixed-1", "fixed-2", "fixed-3"};
  auto t7 = Clock::now();
  const Rows drows = run_experiment(spec_for(base, SweepVariable::FronthaulMbps, Dgrid, dpol));
  const double dsecs = since(t7);

  {
    Criterion c{6, "simulated fronthaul of the calibrated MDP and heuristic policies stays within 1.02 D"};
    check_rows(c, drows);
    for (double D : {50.0, 360.0, 1000.0})
      for (const char* name : {"mdp", "heuristic"}) {
        const ResultRow* r = find(drows, D, name);
        if (!r) continue;
        const double ratio = r->fronthaul / r->budget;
        c.check(r->episodes * r->slots >= 100000, "fewer than 1e5 slots");
        c.check(ratio <= 1.02, fmt("%s at %g Mbit/s: fronthaul %.4f D", name, D, ratio));
        c.note(fmt("%-9s D=%4g Mbit/s: fronthaul/D = %.4f over %zu slots", name, D, ratio, r->episodes * r->slots));
      }
    c.note("budgets span below the lowest mode rate (151 Mbit/s) to above the highest (983 Mbit/s)");
    report(std::move(c));
  }

  {
    Criterion c{7, "policy ordering at every fronthaul budget"};
    check_rows(c, drows);
    double worst_round = 0.0, worst_heu = 1.0;
    for (double D : Dgrid) {
      const ResultRow *up = find(drows, D, "offline-upper"), *ro = find(drows, D, "offline-rounded"),
                      *md = find(drows, D, "mdp"), *he = find(drows, D, "heuristic");
      if (!up || !ro || !md || !he) continue;
      c.check(up->throughput >= ro->throughput - 1e-9, fmt("D=%g: upper %.5f < rounded %.5f", D, up->throughput, ro->throughput));
      const double nr = 3 * combined(ro->throughput_stderr, md->throughput_stderr);
      c.check(ro->throughput >= md->throughput - nr, fmt("D=%g: rounded %.5f < mdp %.5f - %.4f", D, ro->throughput, md->throughput, nr));
      c.check(md->throughput >= he->throughput - 3 * he->throughput_stderr,
              fmt("D=%g: mdp %.5f < heuristic %.5f - 3 se", D, md->throughput, he->throughput));
      const double round_gap = 1 - ro->throughput / up->throughput, heu = he->throughput / md->throughput;
      worst_round = std::max(worst_round, round_gap);
      worst_heu = std::min(worst_heu, heu);
      c.check(round_gap <= 0.03, fmt("D=%g: rounded %.2f%% below upper", D, 100 * round_gap));
      c.check(heu >= 0.90, fmt("D=%g: heuristic at %.3f of mdp", D, heu));
      for (int k = 1; k <= 3; ++k) {
        const auto fu = find(drows, D, "offline-upper-fixed-" + std::to_string(k));
        const auto fr = find(drows, D, "offline-fixed-" + std::to_string(k));
        const auto fh = find(drows, D, "fixed-" + std::to_string(k));
        if (fu) c.check(up->throughput >= fu->throughput * (1 - 1e-7), fmt("D=%g: upper below fixed-%d", D, k));
        if (fr)
          c.check(ro->throughput >= fr->throughput - 3 * combined(ro->throughput_stderr, fr->throughput_stderr),
                  fmt("D=%g: rounded %.5f below rounded fixed-%d %.5f", D, ro->throughput, k, fr->throughput));
        if (fh)
          c.check(he->throughput >= fh->throughput - 3 * combined(he->throughput_stderr, fh->throughput_stderr),
                  fmt("D=%g: heuristic %.5f below fixed-%d %.5f", D, he->throughput, k, fh->throughput));
      }
      c.note(fmt("D=%4g: upper %.4f rounded %.4f mdp %.4f(+-%.4f) heuristic %.4f(+-%.4f)", D, up->throughput,
                 ro->throughput, md->throughput, md->throughput_stderr, he->throughput, he->throughput_stderr));
    }
    const double elapsed = since(start);
    c.check(elapsed < 600.0, fmt("suite already at %.0f s", elapsed));
    c.note(fmt("worst rounding gap %.2f%% (tol 3%%), worst heuristic/mdp %.3f (tol 0.90); sweep %.0f s, suite so far %.0f s (limit 600 s)",
               100 * worst_round, worst_heu, dsecs, elapsed));
    report(std::move(c));
  }

  Rows erows, brows;
  double esecs = 0.0;
  {
    Criterion c{8, "sweep shapes: concave D curve, single-mode limits, linear low-energy growth, battery-insensitive at low energy"};
    check_rows(c, drows);
    // D sweep: increasing and saturating on the exact curves. The offline optimum is concave in D.
    // The calibrated mdp policy is deterministic and meets D only up to a jump, so its points are
    // checked for concavity against the fronthaul they actually use (they lie on the Lagrangian
    // envelope); slopes against nominal D are reported.
    for (const char* name : {"offline-upper", "mdp"}) {
      const bool mdp = std::string(name) == "mdp";
      std::vector<double> x, y;
      for (double D : Dgrid) {
        const ResultRow* r = find(drows, D, name);
        x.push_back(!r ? D : mdp ? units_to_mbps(r->exact_fronthaul, base.slot_seconds) : D);
        y.push_back(!r ? 0.0 : mdp ? r->exact_rate : r->throughput);
      }
      std::vector<double> slope, nominal;
      for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        c.check(y[i + 1] > y[i], fmt("%s not increasing at D=%g", name, Dgrid[i + 1]));
        slope.push_back((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
        nominal.push_back((y[i + 1] - y[i]) / (Dgrid[i + 1] - Dgrid[i]));
      }
      for (std::size_t i = 0; i + 1 < slope.size(); ++i)
        c.check(slope[i + 1] <= slope[i] * 1.10,
                fmt("%s slope rises between D=%g and D=%g: %.3e -> %.3e", name, Dgrid[i], Dgrid[i + 2], slope[i], slope[i + 1]));
      c.check(nominal.front() >= 5 * nominal.back(), fmt("%s does not saturate", name));
      c.note(fmt("%s: first slope %.2e, last slope %.2e per Mbit/s of D", name, nominal.front(), nominal.back()));
      if (mdp) {
        double rise = 0.0;
        for (std::size_t i = 0; i + 1 < nominal.size(); ++i) rise = std::max(rise, nominal[i + 1] / nominal[i]);
        std::string used;
        for (std::size_t i = 0; i < x.size(); ++i) used += fmt(" %.3f", x[i] / Dgrid[i]);
        c.note(fmt("mdp: used fronthaul / D:%s", used.c_str()));
        c.note(fmt("mdp: slope vs used fronthaul decreasing within 10%%; largest step-to-step ratio vs nominal D %.3f",
                   rise));
      }
    }
    for (const char* fam : {"offline-upper", "heuristic"}) {
      const std::string pre = std::string(fam) == "heuristic" ? "fixed-" : "offline-upper-fixed-";
      const ResultRow *lo = find(drows, Dgrid.front(), fam), *lo3 = find(drows, Dgrid.front(), pre + "3");
      const ResultRow *hi = find(drows, Dgrid.back(), fam), *hi1 = find(drows, Dgrid.back(), pre + "1");
      if (!lo || !lo3 || !hi || !hi1) continue;
      const double a = lo3->throughput / lo->throughput, b = hi1->throughput / hi->throughput;
      c.check(a >= 0.97, fmt("%s: mode 3 only at D=%g reaches %.3f of flexible", fam, Dgrid.front(), a));
      c.check(b >= 0.97, fmt("%s: mode 1 only at D=%g reaches %.3f of flexible", fam, Dgrid.back(), b));
      c.note(fmt("%s: mode 3 at D=%g = %.4f of flexible; mode 1 at D=%g = %.4f", fam, Dgrid.front(), a, Dgrid.back(), b));
    }

    // energy sweep at the nominal 360 Mbit/s
    const std::vector<double> Egrid = {0.25, 0.5, 0.75, 1, 1.5, 2, 3, 4, 5, 6, 8};
    const auto te = Clock::now();
    erows = run_experiment(
        spec_for(base, SweepVariable::EnergyMean, Egrid, {"offline-upper", "offline-rounded", "mdp", "heuristic"}));
    esecs = since(te);
    check_rows(c, erows);
    const double third = Egrid.front() + (Egrid.back() - Egrid.front()) / 3.0;
    // linear growth is gated on the relax-and-round curves; online curves are reported only
    for (const char* name : {"offline-upper", "offline-rounded", "mdp", "heuristic"}) {
      const bool gated = std::string(name).rfind("offline", 0) == 0;
      std::vector<double> x, y;
      double prev = 0.0;
      for (double E : Egrid) {
        const ResultRow* r = find(erows, E, name);
        if (!r) continue;
        c.check(r->throughput >= prev - 3 * r->throughput_stderr, fmt("%s decreases at E=%g", name, E));
        prev = r->throughput;
        if (E <= third) {
          x.push_back(E);
          y.push_back(r->throughput);
        }
      }
      const auto [slope, r2] = linear_fit(x, y);
      if (gated) c.check(r2 >= 0.99, fmt("%s: R^2 %.4f on E <= %.2f", name, r2, third));
      c.note(fmt("%s: E sweep lower third (%zu points, E <= %.2f) slope %.4f, R^2 %.5f%s", name, x.size(), third, slope,
                 r2, gated ? "" : " (reported)"));
    }

    // battery sizes at the smallest energy rate
    const double Emin = Egrid.front();
    std::map<std::string, std::vector<double>> by_policy;
    for (double BJ : {500.0, 1000.0, 2000.0}) {
      ExperimentSpec s = spec_for(apply_sweep(base, SweepVariable::BatteryJoules, BJ), SweepVariable::EnergyMean,
                                  {Emin}, {"offline-upper", "mdp", "heuristic"});
      const Rows r = run_experiment(s);
      check_rows(c, r);
      for (const auto& row : r) by_policy[row.policy].push_back(row.throughput);
      brows.insert(brows.end(), r.begin(), r.end());
    }
    for (const auto& [name, ys] : by_policy) {
      const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
      const double spread = *mx / *mn - 1;
      c.check(spread <= 0.01, fmt("%s: battery curves differ by %.2f%% at E=%g", name.c_str(), 100 * spread, Emin));
      c.note(fmt("%s at E=%g, B = 500/1000/2000 J: %.5f %.5f %.5f (spread %.3f%%)", name.c_str(), Emin, ys[0], ys[1], ys[2],
                 100 * spread));
    }
    report(std::move(c));
  }

  {
    Criterion c{9, "energy balance holds on every simulated episode; battery stays within [0, B_max]"};
    double worst = 0.0;
    std::size_t rows_checked = 0;
    for (const Rows* rs : std::vector<const Rows*>{&drows, &erows, &brows})
      for (const auto& r : *rs) {
        if (r.policy.rfind("offline-upper", 0) == 0 || !r.error.empty()) continue;
        ++rows_checked;
        worst = std::max(worst, r.max_imbalance);
        c.check(r.max_imbalance <= 1e-12, fmt("%s at %g: imbalance %.3e", r.policy.c_str(), r.value, r.max_imbalance));
      }
    // per-episode battery bounds on the nominal budget
    std::size_t episodes = 0;
    double lo = 1e300, hi = -1e300;
    for (const std::string name : {"mdp", "heuristic", "offline-rounded", "fixed-2"}) {
      auto policy = make_policy(name, base);
      for (std::uint64_t e = 0; e < 10; ++e) {
        RunOptions o;
        o.keep_records = false;
        const auto t = run_episode(base, *policy, 10000, derive_seed(99, e), o);
        const auto& s = t.summary;
        const double imb = std::abs(s.balance_error()) / (1 + s.arrivals);
        worst = std::max(worst, imb);
        lo = std::min(lo, s.min_battery);
        hi = std::max(hi, s.max_battery);
        c.check(imb <= 1e-12, fmt("%s episode %llu: imbalance %.3e", name.c_str(), (unsigned long long)e, imb));
        c.check(s.min_battery >= 0.0 && s.max_battery <= base.battery_capacity,
                fmt("%s episode %llu: battery range [%g, %g]", name.c_str(), (unsigned long long)e, s.min_battery, s.max_battery));
        ++episodes;
      }
    }
    c.note(fmt("%zu sweep rows plus %zu extra episodes; worst |balance| / (1 + arrivals) %.2e (tol 1e-12); battery range [%g, %g]",
               rows_checked, episodes, worst, lo, hi));
    report(std::move(c));
  }

  {
    Criterion c{10, "multi-carrier rate through the effective gain within 2% at high SNR"};
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0, lib_gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int C = 2 + static_cast<int>(u(gen) * 63);
      const double mean = 0.2 + 5 * u(gen);
      std::vector<double> g(C);
      for (auto& x : g) x = -mean * std::log(1 - u(gen));
      const double gmin = *std::min_element(g.begin(), g.end());
      const double p = 10.0 / gmin * (1 + 9 * u(gen));
      double exact = 0.0, logsum = 0.0;
      for (double x : g) {
        exact += std::log1p(x * p) / C;
        logsum += std::log(x) / C;
      }
      const double approx = std::log1p(std::exp(logsum) * p);
      const double rel = std::abs(approx - exact) / exact;
      worst = std::max(worst, rel);
      c.check(rel <= 0.02, fmt("vector %d (C=%d): %.3f%%", i, C, 100 * rel));
      lib_gap = std::max({lib_gap, std::abs(multicarrier_rate(g, p) - exact) / exact,
                          std::abs(std::log1p(effective_gain(g) * p) - approx) / approx});
    }
    c.check(lib_gap <= 1e-12, fmt("library and test formulas differ by %.2e", lib_gap));
    c.note(fmt("1000 Rayleigh vectors, 2..64 carriers, min gain*power >= 10: worst relative error %.3f%% (tol 2%%)", 100 * worst));
    report(std::move(c));
  }

  int failed = 0;
  for (const auto& c : results) failed += !c.ok;
  const double total = since(start);
  std::printf("%d/%zu criteria passed in %.0f s (sweep budget: under 600 s for the full suite)\n",
              static_cast<int>(results.size()) - failed, results.size(), total);
  return failed;
}
