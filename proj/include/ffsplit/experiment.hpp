#pragma once

// Parameter sweeps over every policy family with common random numbers.
//
// Offline policies are solved on `offline_episodes` sampled traces of
// cfg.epochs epochs; online policies run `episodes` episodes of `horizon`
// slots. Episode e of every policy uses derive_seed(seed, e).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

enum class SweepVariable {
  FronthaulMbps,  // D in Mbit/s
  Fronthaul,      // D in data units per slot
  EnergyMean,     // E_avg
  BatteryJoules,  // B_max in J
  Battery,        // B_max in energy units
};

SweepVariable parse_sweep_variable(const std::string& name);
std::string sweep_variable_name(SweepVariable v);
/// Copy of `cfg` with the swept quantity set to `value`.
SystemConfig apply_sweep(const SystemConfig& cfg, SweepVariable v, double value);

struct ExperimentSpec {
  SystemConfig base;
  SweepVariable variable = SweepVariable::FronthaulMbps;
  std::vector<double> grid;
  std::vector<std::string> policies;
  std::size_t episodes = 100;
  std::size_t horizon = 10000;         // slots per online episode
  std::size_t offline_episodes = 100;  // traces of cfg.epochs epochs
  std::uint64_t seed = 1;
  double eta_tolerance = 1e-3;
  std::size_t threads = 0;  // worker pool size; 0 = hardware concurrency
};

/// Reads a spec file; "config" is resolved relative to the spec's directory.
/// "fixed" optionally pins other sweep variables of the base config, e.g.
/// {"battery_j": 500}.
///   {"config": "nominal.cfg", "variable": "fronthaul_mbps", "grid": [...],
///    "policies": [...], "episodes": 100, "horizon": 10000,
///    "offline_episodes": 100, "seed": 1, "eta_tolerance": 1e-3, "threads": 0}
ExperimentSpec load_experiment(const std::string& path);
ExperimentSpec parse_experiment(const std::string& text, const std::string& base_dir);

/// Names accepted besides those of make_policy: offline-upper and
/// offline-upper-fixed-<k> (continuous solution value, not simulated).
bool is_known_policy(const std::string& name, std::size_t modes);
/// -1 for offline-upper, k-1 for offline-upper-fixed-<k>, -2 otherwise.
int offline_upper_mode(const std::string& name, std::size_t modes);

struct ResultRow {
  std::string variable;
  double value = 0.0;
  std::string policy;
  std::size_t episodes = 0;
  std::size_t slots = 0;       // per episode
  double throughput = 0.0;     // nats per slot
  double throughput_stderr = 0.0;
  double fronthaul = 0.0;      // data units per slot
  double fronthaul_stderr = 0.0;
  double budget = 0.0;         // D, data units per slot
  double waste = 0.0;          // energy lost per slot (overflow and clipping)
  std::size_t clamped = 0;
  double max_imbalance = 0.0;  // energy balance error relative to 1 + arrivals
  double eta = 0.0;            // mdp only
  double exact_rate = 0.0;     // mdp only: stationary evaluation
  double exact_fronthaul = 0.0;
  double seconds = 0.0;
  std::string error;
};

using Progress = std::function<void(const ResultRow&)>;

/// One row per (grid point, policy), in grid order then spec order whatever
/// the pool size. Failures are recorded in `error` and the sweep continues.
/// `progress` is called as rows complete, serialized but in completion order.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const Progress& progress = {});

}  // namespace ffsplit
