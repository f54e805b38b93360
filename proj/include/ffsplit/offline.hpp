#pragma once

// Non-causal planner: with every epoch's energy arrival and every block's
// channel gain known in advance, choose per-block durations and powers for
// each split mode to maximize total throughput under the average fronthaul
// budget, energy causality, battery capacity and block length.
//
// The relaxed (continuous-duration) program is concave in (theta, alpha =
// theta * p) and is solved with a log-barrier Newton method. Battery overflow
// is modelled with an explicit per-epoch battery level b_m:
//
//   c_m <= b_m,  b_{m+1} <= b_m - c_m + E_{m+1},  b_m <= B_max,
//
// which admits the same optimal value as the cumulative capacity constraint
// (surplus energy is lost at the next deposit) and always has a strictly
// feasible interior.

#include <cstddef>
#include <string>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

struct OfflineInstance {
  SystemConfig cfg;
  std::vector<double> energy;              // per epoch, energy units
  std::vector<std::vector<double>> gains;  // [epoch][block], per W

  std::size_t epochs() const { return energy.size(); }
  std::size_t blocks() const { return static_cast<std::size_t>(cfg.blocks_per_epoch); }
  /// Throws ConfigError when shapes or values are off.
  void validate() const;
};

struct OfflineResiduals {
  double fronthaul = 0.0;     // relative excess of the average-rate constraint
  double causality = 0.0;     // relative excess of cumulative consumption
  double battery = 0.0;       // relative excess of the capacity constraint, waste accounted
  double block_length = 0.0;  // absolute excess of sum_x theta over L
  double negativity = 0.0;    // most negative theta or alpha
  double complementarity = 0.0;  // max multiplier * slack
  double worst() const;
};

struct OfflineSolution {
  std::size_t epochs = 0, blocks = 0, modes = 0;
  std::vector<double> durations;  // index (m*blocks + n)*modes + x
  std::vector<double> powers;
  std::vector<double> gains;      // index m*blocks + n
  ModeCatalog catalog;
  int slots_per_block = 0;
  double budget = 0.0;

  double throughput = 0.0;  // nats over the horizon
  double fronthaul_multiplier = 0.0;        // phi, for the per-slot average form
  std::vector<double> energy_price;         // per epoch: sum of causality minus battery prices
  std::vector<double> causality_multiplier; // mu, per epoch
  std::vector<double> battery_multiplier;   // nu, per epoch (last is 0)
  std::vector<double> battery_level;        // b_m at the start of each epoch
  std::vector<double> waste;                // energy lost at the deposit ending epoch m
  OfflineResiduals residuals;
  double duality_gap = 0.0;
  int newton_steps = 0;
  bool converged = false;

  std::size_t index(std::size_t m, std::size_t n, std::size_t x) const {
    return (m * blocks + n) * modes + x;
  }
  double duration(std::size_t m, std::size_t n, std::size_t x) const { return durations[index(m, n, x)]; }
  double power(std::size_t m, std::size_t n, std::size_t x) const { return powers[index(m, n, x)]; }
  double gain(std::size_t m, std::size_t n) const { return gains[m * blocks + n]; }
  BlockAllocation block(std::size_t m, std::size_t n) const;
  double epoch_energy(std::size_t m) const;
  double fronthaul_total() const;
};

struct OfflineOptions {
  double gap_tolerance = 1e-9;   // relative to 1 + |objective|
  double select_threshold = 1e-6;
  double zero_threshold = 1e-9;
  int max_newton_steps = 5000;
};

/// Solves the relaxed program; throws std::runtime_error if Newton stalls.
OfflineSolution solve_offline(const OfflineInstance& inst, const OfflineOptions& opts = {});

/// Largest |p - (1/price_m - 1/gamma)| over selected durations.
double kkt_power_residual(const OfflineSolution& sol, double select_threshold = 1e-6);

struct StructureViolation {
  enum class Kind { UnequalPowerInBlock, TooManyModesInEpoch, UnequalWaterLevel };
  Kind kind;
  std::size_t epoch = 0;
  std::size_t block = 0;
  double magnitude = 0.0;
  std::string describe() const;
};

struct StructureReport {
  std::vector<StructureViolation> violations;
  std::vector<bool> collinear_exempt;  // per epoch
  bool ok() const { return violations.empty(); }
};

struct StructureTolerances {
  double select = 1e-6;
  double power = 1e-4;
  double level = 1e-4;
};

/// Checks: equal power of selected modes in a block; at most two modes per
/// epoch unless their (R, eps) are collinear; equal p + 1/gamma across the
/// selected blocks of an epoch.
StructureReport verify_structure(const OfflineSolution& sol, const StructureTolerances& tol = {});

/// True when the three modes' trade-off slopes coincide within `rel`.
bool collinear_modes(const SplitMode& a, const SplitMode& b, const SplitMode& c, double rel = 1e-9);

struct IntegerSolution {
  std::size_t epochs = 0, blocks = 0, modes = 0;
  std::vector<int> slots;      // index (m*blocks + n)*modes + x
  std::vector<double> powers;  // per slot of that mode in that block
  std::vector<double> gains;
  double throughput = 0.0;
  double clip_waste = 0.0;     // energy dropped by the P_max clip
  std::vector<double> unplaced;  // per epoch: planned energy with no slot to carry it
  bool fell_back = false;      // some mode had to be rounded down for energy
  double fronthaul_slack = 0.0;  // budget minus used, data units

  std::size_t index(std::size_t m, std::size_t n, std::size_t x) const {
    return (m * blocks + n) * modes + x;
  }
  int slot_count(std::size_t m, std::size_t n, std::size_t x) const { return slots[index(m, n, x)]; }
  double power(std::size_t m, std::size_t n, std::size_t x) const { return powers[index(m, n, x)]; }
  double epoch_energy(std::size_t m, const ModeCatalog& cat) const;
  double fronthaul_total(const ModeCatalog& cat) const;
};

/// Relax-and-round: integer slot counts per selected mode, transmission energy
/// rebalanced for the rounded processing energy, powers re-levelled per epoch,
/// then clipped at P_max.
IntegerSolution round_solution(const OfflineSolution& sol, const OfflineInstance& inst);

}  // namespace ffsplit
