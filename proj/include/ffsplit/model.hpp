#pragma once

// Domain types shared by every solver and the simulator.
//
// Units: time is slot-normalized (one slot == 1), so a power in W applied for
// one slot consumes one energy unit (W*slot). Fronthaul rates and budgets are
// stored in data units per slot (Mbit per slot). Rates are in nats.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ffsplit {

/// Thrown by validate_config and the config reader; `path` names the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct SplitMode {
  int id = 0;                    // 1-based, in catalog order
  double fronthaul_rate = 0.0;   // data units per slot
  double processing_power = 0.0; // W
};

/// Modes sorted by decreasing fronthaul rate (hence increasing processing power).
struct ModeCatalog {
  std::vector<SplitMode> modes;

  std::size_t size() const { return modes.size(); }
  const SplitMode& operator[](std::size_t i) const { return modes[i]; }
  double max_rate() const;
  double min_processing() const;
  /// Catalog holding only mode `index` (0-based), keeping its id.
  ModeCatalog only(std::size_t index) const;
};

struct ChannelChain {
  std::vector<double> gains;                     // increasing, per W
  std::vector<std::vector<double>> transitions;  // row-stochastic, q[g1][g2]
  std::vector<double> initial;

  std::size_t size() const { return gains.size(); }
  /// Stationary distribution (power iteration; exact for iid rows).
  std::vector<double> stationary() const;
};

struct PoissonArrivals {
  double mean = 0.0;  // E_avg; epoch arrival is A*N*L with A ~ Poisson(mean)
};

struct MarkovArrivals {
  std::vector<double> levels;                    // energy units, A_e
  std::vector<std::vector<double>> transitions;  // p[e1][e2]
  std::vector<double> initial;
};

struct EnergyArrivalLaw {
  std::variant<PoissonArrivals, MarkovArrivals> law;

  bool is_markov() const { return std::holds_alternative<MarkovArrivals>(law); }
};

/// Discrete distribution of one epoch's (clipped) arrival. For Poisson the
/// support is min(A*N*L, B_max) for A = 0..A_max, the last atom holding the
/// whole tail.
struct ArrivalPmf {
  std::vector<double> values;
  std::vector<double> probs;
  double mean() const;
};

/// Settings for the dynamic-programming solver's quantization and iteration.
struct MdpSettings {
  int battery_levels = 0;  // 0 => one level per energy unit
  int power_levels = 0;    // 0 => one level per W
  double relaxation = 0.5;
  double tolerance = 1e-6;  // scaled by (1 + |gain|)
  int max_iterations = 100000;
  std::size_t max_states = 2'000'000;
};

struct HeuristicSettings {
  int good_from = -1;       // first good channel index; -1 => upper half
  int lookahead_blocks = 0; // 0 => 2*N
};

struct SystemConfig {
  int slots_per_block = 4;   // L
  int blocks_per_epoch = 2;  // N
  int epochs = 8;            // M (offline horizon)
  double battery_capacity = 100.0;  // energy units
  double max_power = 20.0;          // W
  double fronthaul_budget = 0.0;    // data units per slot
  double slot_seconds = 10.0;
  ModeCatalog catalog;
  ChannelChain channel;
  EnergyArrivalLaw energy;
  MdpSettings mdp;
  HeuristicSettings heuristic;

  int slots_per_epoch() const { return slots_per_block * blocks_per_epoch; }
};

/// Checks every invariant; throws ConfigError naming the first violated field.
const SystemConfig& validate_config(const SystemConfig& cfg);

/// The three-mode catalog from the LTE reference split measurements, with
/// fronthaul converted from Mbit/s into Mbit per slot.
ModeCatalog nominal_mode_table(double slot_seconds = 10.0);

/// Reference scenario: L=4, N=2, B_max=1000 J, Rayleigh mean gain 2/W over
/// G=4 quantiles seen by the best of U=2 users, Poisson arrivals of mean 5 W.
SystemConfig nominal_config(double fronthaul_mbps = 360.0, double energy_mean = 5.0);

ArrivalPmf arrival_pmf(const SystemConfig& cfg);

/// Arrival distribution for the next epoch given the current arrival state
/// (ignored for Poisson).
ArrivalPmf arrival_pmf_given(const SystemConfig& cfg, std::size_t current_state);

/// Per-block decision: duration (slots) and power per mode.
struct BlockAllocation {
  std::vector<double> durations;
  std::vector<double> powers;

  explicit BlockAllocation(std::size_t modes = 0) : durations(modes, 0.0), powers(modes, 0.0) {}
  double total_duration() const;
  double energy(const ModeCatalog& cat) const;      // sum theta*(p+eps)
  double fronthaul(const ModeCatalog& cat) const;   // sum theta*R
  double throughput(double gain) const;             // sum theta*log(1+gain*p), nats
};

/// Library version string.
const char* library_version();

double mbps_to_units(double mbps, double slot_seconds);
double units_to_mbps(double units, double slot_seconds);

}  // namespace ffsplit
