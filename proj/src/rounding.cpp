#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffsplit/offline.hpp"

namespace ffsplit {

double IntegerSolution::epoch_energy(std::size_t m, const ModeCatalog& cat) const {
  double e = 0.0;
  for (std::size_t n = 0; n < blocks; ++n)
    for (std::size_t x = 0; x < modes; ++x) e += slot_count(m, n, x) * (power(m, n, x) + cat[x].processing_power);
  return e;
}

double IntegerSolution::fronthaul_total(const ModeCatalog& cat) const {
  double f = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) f += slots[i] * cat[i % modes].fronthaul_rate;
  return f;
}

namespace {

struct Cell {
  std::size_t n;
  double remainder;
  double gain;
};

// Powers for the slots of one epoch: a common level W with p_n = W - 1/gamma_n
// that spends `energy` exactly. Blocks whose p would be <= 0 lose their slots
// (their processing energy is refunded into the pool) and the level is redone.
void level_epoch(IntegerSolution& out, std::size_t m, double energy, const ModeCatalog& cat) {
  const std::size_t N = out.blocks, X = out.modes;
  auto slots_in = [&](std::size_t n) {
    int s = 0;
    for (std::size_t x = 0; x < X; ++x) s += out.slot_count(m, n, x);
    return s;
  };
  while (true) {
    std::vector<std::size_t> live;
    for (std::size_t n = 0; n < N; ++n)
      if (slots_in(n) > 0) live.push_back(n);
    if (live.empty()) return;
    if (energy <= 0.0) {
      // nothing left for transmission: the slots would carry zero rate
      for (auto n : live)
        for (std::size_t x = 0; x < X; ++x) {
          energy += out.slot_count(m, n, x) * cat[x].processing_power;
          out.slots[out.index(m, n, x)] = 0;
        }
      continue;
    }
    // water level by sorting inverse gains: sum_n s_n (W - 1/g_n)^+ = energy
    std::sort(live.begin(), live.end(),
              [&](std::size_t a, std::size_t b) { return out.gains[m * N + a] > out.gains[m * N + b]; });
    double s_sum = 0.0, inv_sum = 0.0, W = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const double s = slots_in(live[i]);
      const double inv = 1.0 / out.gains[m * N + live[i]];
      const double w = (energy + inv_sum + s * inv) / (s_sum + s);
      if (w <= inv) break;
      s_sum += s;
      inv_sum += s * inv;
      W = w;
      used = i + 1;
    }
    if (used < live.size()) {
      for (std::size_t i = used; i < live.size(); ++i)
        for (std::size_t x = 0; x < X; ++x) {
          energy += out.slot_count(m, live[i], x) * cat[x].processing_power;
          out.slots[out.index(m, live[i], x)] = 0;
        }
      continue;
    }
    for (auto n : live) {
      const double p = W - 1.0 / out.gains[m * N + n];
      for (std::size_t x = 0; x < X; ++x)
        if (out.slot_count(m, n, x) > 0) out.powers[out.index(m, n, x)] = p;
    }
    return;
  }
}

}  // namespace

IntegerSolution round_solution(const OfflineSolution& sol, const OfflineInstance& inst) {
  const std::size_t M = sol.epochs, N = sol.blocks, X = sol.modes;
  const auto& cat = sol.catalog;
  const int L = sol.slots_per_block;
  const double select = 1e-6;

  IntegerSolution out;
  out.epochs = M;
  out.blocks = N;
  out.modes = X;
  out.slots.assign(M * N * X, 0);
  out.powers.assign(M * N * X, 0.0);
  out.gains = sol.gains;
  out.unplaced.assign(M, 0.0);

  auto block_used = [&](std::size_t m, std::size_t n) {
    int s = 0;
    for (std::size_t x = 0; x < X; ++x) s += out.slot_count(m, n, x);
    return s;
  };

  // 1. slot counts per (epoch, mode): the mode total is rounded to the nearest
  // integer and the units are handed out by largest remainder.
  std::vector<double> planned(M, 0.0);  // continuous consumption per epoch
  for (std::size_t m = 0; m < M; ++m) {
    planned[m] = sol.epoch_energy(m);
    for (std::size_t x = 0; x < X; ++x) {
      double total = 0.0;
      std::vector<Cell> cells;
      for (std::size_t n = 0; n < N; ++n) {
        const double th = sol.duration(m, n, x);
        total += th;
        const int base = static_cast<int>(std::floor(th + 1e-9));
        out.slots[out.index(m, n, x)] = base;
        cells.push_back({n, th - base, sol.gain(m, n)});
      }
      if (total <= select) continue;
      const int target = static_cast<int>(std::floor(total + 0.5));
      int have = 0;
      for (std::size_t n = 0; n < N; ++n) have += out.slot_count(m, n, x);
      std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        return a.gain > b.gain;
      });
      for (const auto& c : cells) {
        if (have >= target) break;
        if (c.remainder <= 0.0 || block_used(m, c.n) >= L) continue;
        ++out.slots[out.index(m, c.n, x)];
        ++have;
      }
    }
  }

  // 2. fronthaul: take back rounded-up slots, highest rate first, until the
  // budget holds (rounding everything down is always feasible).
  const double budget = inst.cfg.fronthaul_budget * static_cast<double>(M * N) * L;
  while (out.fronthaul_total(cat) > budget * (1.0 + 1e-12)) {
    std::size_t pick = out.slots.size();
    double pick_rate = -1.0, pick_excess = 0.0;
    for (std::size_t i = 0; i < out.slots.size(); ++i) {
      const double excess = out.slots[i] - sol.durations[i];
      if (out.slots[i] == 0 || excess <= 0.0) continue;
      const double r = cat[i % X].fronthaul_rate;
      if (r > pick_rate || (r == pick_rate && excess > pick_excess)) {
        pick = i;
        pick_rate = r;
        pick_excess = excess;
      }
    }
    if (pick == out.slots.size()) break;
    --out.slots[pick];
  }

  // 3. energy, epoch by epoch. The pool is the planned consumption plus
  // whatever earlier epochs left in the battery (the rounded plan never holds
  // less than the continuous one). If the pool cannot pay the processing of
  // the rounded slots plus some transmission, slots are rounded back down.
  double slack = budget - out.fronthaul_total(cat);
  const double Bmax = inst.cfg.battery_capacity;
  double level = 0.0;  // battery of the rounded plan before this epoch's use
  for (std::size_t m = 0; m < M; ++m) {
    level = std::min(level + inst.energy[m], Bmax);
    const double pool = planned[m] + std::max(0.0, level - sol.battery_level[m]);
    auto processing = [&] {
      double proc = 0.0;
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t x = 0; x < X; ++x) proc += out.slot_count(m, n, x) * cat[x].processing_power;
      return proc;
    };
    while (processing() > 0.0 && pool - processing() <= 1e-9 * (1.0 + pool)) {
      // drop the slot whose continuous share is smallest
      std::size_t pick = out.slots.size();
      double pick_theta = 0.0;
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t x = 0; x < X; ++x) {
          const auto i = out.index(m, n, x);
          if (out.slots[i] == 0) continue;
          const double share = sol.durations[i] - (out.slots[i] - 1);
          if (pick == out.slots.size() || share < pick_theta) {
            pick = i;
            pick_theta = share;
          }
        }
      --out.slots[pick];
      slack += cat[pick % X].fronthaul_rate;
      out.fell_back = true;
    }
    // an epoch that planned to transmit keeps at least one affordable slot
    if (processing() == 0.0) {
      std::size_t pick = out.slots.size();
      double best_theta = select;
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t x = 0; x < X; ++x) {
          const auto i = out.index(m, n, x);
          const double th = sol.durations[i];
          if (th <= best_theta || cat[x].fronthaul_rate > slack || pool <= cat[x].processing_power) continue;
          if (pick == out.slots.size() || th > best_theta) {
            pick = i;
            best_theta = th;
          }
        }
      if (pick < out.slots.size()) {
        out.slots[pick] = 1;
        slack -= cat[pick % X].fronthaul_rate;
      }
    }
    level_epoch(out, m, pool - processing(), cat);
    const double spent = out.epoch_energy(m, cat);
    out.unplaced[m] = std::max(0.0, planned[m] - spent);
    level -= spent;
  }

  // 4. clip at P_max; the clipped energy stays unspent.
  const double pmax = inst.cfg.max_power;
  out.throughput = 0.0;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t x = 0; x < X; ++x) {
        const auto i = out.index(m, n, x);
        if (out.slots[i] == 0) {
          out.powers[i] = 0.0;
          continue;
        }
        if (out.powers[i] > pmax) {
          out.clip_waste += out.slots[i] * (out.powers[i] - pmax);
          out.powers[i] = pmax;
        }
        out.throughput += out.slots[i] * std::log1p(out.gains[m * N + n] * out.powers[i]);
      }
  out.fronthaul_slack = budget - out.fronthaul_total(cat);
  return out;
}

}  // namespace ffsplit
