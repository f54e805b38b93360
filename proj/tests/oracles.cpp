#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ffsplit::oracle {

double golden_glue_power(double gain, double eps) {
  if (eps <= 0.0) return 0.0;
  auto f = [&](double p) { return std::log1p(gain * p) / (p + eps); };
  double lo = 0.0, hi = 1.0;
  while (f(2.0 * hi) > f(hi)) hi *= 2.0;
  hi *= 2.0;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + (1 - r) * (hi - lo), b = lo + r * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fa < fb) {
      lo = a; a = b; fa = fb; b = lo + r * (hi - lo); fb = f(b);
    } else {
      hi = b; b = a; fb = fa; a = lo + (1 - r) * (hi - lo); fa = f(a);
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double two_mode_value(double p, double t1, double E, double T, double g, double D,
                      const SplitMode& m1, const SplitMode& m2) {
  const double R1 = m1.fronthaul_rate, R2 = m2.fronthaul_rate;
  const double e1 = m1.processing_power, e2 = m2.processing_power;
  if (t1 > T + 1e-15 || t1 * R1 > D * T * (1 + 1e-15) || t1 * (p + e1) > E * (1 + 1e-15)) return -1.0;
  double t2 = std::min({T - t1, (D * T - t1 * R1) / R2, (E - t1 * (p + e1)) / (p + e2)});
  t2 = std::max(t2, 0.0);
  return (t1 + t2) * std::log1p(g * p);
}

}  // namespace

double grid_two_mode(double E, double T, double g, double D, const SplitMode& m1,
                     const SplitMode& m2, double pmax) {
  if (E <= 0.0 || D <= 0.0 || T <= 0.0) return 0.0;
  double best = 0.0, bp = 0.0, bt = 0.0;
  double p_lo = 0.0, p_hi = pmax, t_lo = 0.0, t_hi = T;
  int steps = 1000;
  for (int pass = 0; pass < 3; ++pass) {
    const double dp = (p_hi - p_lo) / steps, dt = (t_hi - t_lo) / steps;
    for (int i = 0; i <= steps; ++i) {
      const double p = p_lo + i * dp;
      for (int j = 0; j <= steps; ++j) {
        const double t1 = t_lo + j * dt;
        const double v = two_mode_value(p, t1, E, T, g, D, m1, m2);
        if (v > best) { best = v; bp = p; bt = t1; }
      }
    }
    p_lo = std::max(0.0, bp - 2 * dp); p_hi = std::min(pmax, bp + 2 * dp);
    t_lo = std::max(0.0, bt - 2 * dt); t_hi = std::min(T, bt + 2 * dt);
    steps = 200;
  }
  return best;
}

double grid_catalog(double E, double T, double g, double D, const ModeCatalog& cat, double pmax) {
  double best = 0.0;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    // a singleton is the pair with an unusable partner
    SplitMode ghost{0, cat[i].fronthaul_rate * 0.5, 1e300};
    best = std::max(best, grid_two_mode(E, T, g, D, cat[i], ghost, pmax));
    for (std::size_t j = i + 1; j < cat.size(); ++j) {
      best = std::max(best, grid_two_mode(E, T, g, D, cat[i], cat[j], pmax));
    }
  }
  return best;
}

double exponential_interval_mean(double mu, double a, double b) {
  const int n = 200000;
  const double h = (b - a) / n;
  auto dens = [mu](double x) { return std::exp(-x / mu) / mu; };
  double m = 0.0, p = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    m += w * x * dens(x);
    p += w * dens(x);
  }
  return m / p;
}

double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                   const std::vector<double>& c, std::vector<double>* x_out) {
  const std::size_t m = A.size(), n = c.size();
  // tableau: m rows of [A | I | b], objective row [-c | 0 | 0]
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) throw std::invalid_argument("simplex_max: negative rhs");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (t[m][j] < -1e-12) { enter = j; break; }  // Bland
    }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > 1e-12) {
        const double ratio = t[i][n + m] / t[i][enter];
        if (ratio < best_ratio - 1e-15 || (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex_max: unbounded");
    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  if (x_out) {
    x_out->assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) (*x_out)[basis[i]] = t[i][n + m];
  }
  return t[m][n + m];
}

namespace {

double offline_lp_at_levels(const std::vector<double>& levels, const std::vector<double>& energy,
                            const std::vector<std::vector<double>>& gains, const ModeCatalog& cat,
                            int L, double budget) {
  const std::size_t M = energy.size(), N = gains[0].size(), X = cat.size();
  std::vector<double> c;
  std::vector<std::size_t> var_m, var_n, var_x;
  std::vector<double> var_p;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n) {
      const double p = levels[m] - 1.0 / gains[m][n];
      if (p <= 0) continue;
      for (std::size_t x = 0; x < X; ++x) {
        c.push_back(std::log1p(gains[m][n] * p));
        var_m.push_back(m); var_n.push_back(n); var_x.push_back(x); var_p.push_back(p);
      }
    }
  if (c.empty()) return 0.0;
  const std::size_t V = c.size();
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> row(V, 0.0);
  for (std::size_t v = 0; v < V; ++v) row[v] = cat[var_x[v]].fronthaul_rate;
  A.push_back(row);
  b.push_back(budget * static_cast<double>(M * N) * L);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t v = 0; v < V; ++v)
        if (var_m[v] == m && var_n[v] == n) row[v] = 1.0;
      A.push_back(row);
      b.push_back(L);
    }
  double cum = 0.0;
  for (std::size_t mh = 0; mh < M; ++mh) {
    cum += energy[mh];
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t v = 0; v < V; ++v)
      if (var_m[v] <= mh) row[v] = var_p[v] + cat[var_x[v]].processing_power;
    A.push_back(row);
    b.push_back(cum);
  }
  return simplex_max(A, b, c);
}

}  // namespace

double offline_water_level_grid(const std::vector<double>& energy,
                                const std::vector<std::vector<double>>& gains,
                                const ModeCatalog& cat, int L, double budget, double level_max,
                                double step) {
  const std::size_t M = energy.size();
  std::vector<double> center(M, 0.5 * level_max);
  double half = 0.5 * level_max;
  double best = 0.0;
  std::vector<double> best_levels = center;
  for (int pass = 0; pass < 4; ++pass) {
    const int k = static_cast<int>(std::ceil(2 * half / step));
    std::vector<int> idx(M, 0);
    while (true) {
      std::vector<double> lv(M);
      bool ok = true;
      for (std::size_t m = 0; m < M; ++m) {
        lv[m] = center[m] - half + idx[m] * step;
        if (lv[m] <= 0) ok = false;
      }
      if (ok) {
        const double v = offline_lp_at_levels(lv, energy, gains, cat, L, budget);
        if (v > best) { best = v; best_levels = lv; }
      }
      std::size_t d = 0;
      while (d < M && ++idx[d] > k) { idx[d] = 0; ++d; }
      if (d == M) break;
    }
    center = best_levels;
    half = 2 * step;
    step /= 10.0;
  }
  return best;
}

double exhaustive_average_reward(const TinyMdp& mdp) {
  const std::size_t S = mdp.P.size();
  std::vector<std::size_t> choice(S, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    // Solve pi (P - I) = 0 with sum pi = 1 by Gaussian elimination.
    std::vector<std::vector<double>> M(S, std::vector<double>(S + 1, 0.0));
    for (std::size_t j = 0; j < S; ++j) {
      for (std::size_t i = 0; i < S; ++i) M[j][i] = mdp.P[i][choice[i]][j] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < S; ++i) M[S - 1][i] = 1.0;
    M[S - 1][S] = 1.0;
    for (std::size_t col = 0; col < S; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < S; ++r)
        if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
      std::swap(M[col], M[piv]);
      for (std::size_t r = 0; r < S; ++r) {
        if (r == col) continue;
        const double f = M[r][col] / M[col][col];
        for (std::size_t k = col; k <= S; ++k) M[r][k] -= f * M[col][k];
      }
    }
    double gain = 0.0;
    for (std::size_t i = 0; i < S; ++i) gain += (M[i][S] / M[i][i]) * mdp.r[i][choice[i]];
    best = std::max(best, gain);
    std::size_t d = 0;
    while (d < S && ++choice[d] >= mdp.r[d].size()) { choice[d] = 0; ++d; }
    if (d == S) break;
  }
  return best;
}

TinyMdp random_tiny_mdp(std::uint64_t seed, int states, int actions) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  TinyMdp mdp;
  mdp.P.resize(states);
  mdp.r.resize(states);
  for (int s = 0; s < states; ++s) {
    for (int a = 0; a < actions; ++a) {
      std::vector<double> row(states);
      double sum = 0.0;
      for (auto& v : row) { v = u(gen); sum += v; }
      for (auto& v : row) v /= sum;
      mdp.P[s].push_back(row);
      mdp.r[s].push_back(u(gen) * 3.0 - 1.0);
    }
  }
  return mdp;
}

}  // namespace ffsplit::oracle
