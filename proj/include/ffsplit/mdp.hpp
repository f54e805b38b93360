#pragma once

// Average-reward MDP over slots. State (B, E, Y, g, n, l): battery level,
// arrival seen at the epoch's first slot, remembered arrival state (Markov
// arrivals only), channel index, block and slot position. Action: idle, or
// transmit at a grid power in one split mode. Reward log(1 + Gamma_g P) minus
// eta * R_x; eta prices fronthaul use and is calibrated against the budget.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

struct MdpState {
  std::size_t battery = 0;  // grid index
  std::size_t arrival = 0;  // support index; energy is nonzero only at (0, 0)
  std::size_t memory = 0;   // last arrival state (Markov law), else 0
  std::size_t channel = 0;
  std::size_t block = 0;    // 0-based n
  std::size_t slot = 0;     // 0-based l
  bool operator==(const MdpState&) const = default;
};

struct MdpAction {
  bool transmit = false;
  std::size_t power = 0;  // 1-based power grid index when transmitting
  std::size_t mode = 0;
  bool operator==(const MdpAction&) const = default;
};

/// Dense indexing of the pruned state space plus the quantization grids.
class StateSpace {
 public:
  explicit StateSpace(const SystemConfig& cfg);

  std::size_t size() const { return total_; }
  std::size_t index(const MdpState& s) const;
  MdpState state(std::size_t index) const;
  /// Size before pruning: B_levels * E_levels * E_levels * G * N * L.
  std::size_t unpruned_size() const;

  const SystemConfig& config() const { return cfg_; }
  std::size_t battery_levels() const { return battery_.size(); }
  std::size_t arrival_levels() const { return arrival_.values.size(); }
  std::size_t memory_levels() const { return markov_ ? arrival_.values.size() : 1; }
  std::size_t power_levels() const { return power_.size(); }
  std::size_t action_count() const { return 1 + cfg_.catalog.size() * power_.size(); }
  std::size_t phases() const { return phases_; }

  double battery_value(std::size_t i) const { return battery_[i]; }
  double battery_step() const { return step_; }
  double arrival_value(std::size_t i) const { return arrival_.values[i]; }
  double power_value(std::size_t i) const { return power_[i - 1]; }
  /// Largest grid level not above `energy` (clamped to the grid).
  std::size_t floor_battery(double energy) const;
  /// Arrival support index for an observed energy (Poisson) or state (Markov).
  std::size_t arrival_index(double energy, std::size_t markov_state) const;
  /// Distribution of the next epoch's arrival index given the memory index.
  const std::vector<double>& next_arrival(std::size_t memory) const { return next_[memory]; }
  bool markov_arrivals() const { return markov_; }

  MdpAction action(std::size_t a) const;
  std::size_t action_index(const MdpAction& a) const;
  bool affordable(const MdpState& s, const MdpAction& a) const;

 private:
  SystemConfig cfg_;
  bool markov_ = false;
  std::vector<double> battery_;
  double step_ = 1.0;
  std::vector<double> power_;
  ArrivalPmf arrival_;
  std::vector<std::vector<double>> next_;
  std::size_t phases_ = 0, first_ = 0, other_ = 0, total_ = 0;
};

/// Sparse next-state distribution; throws std::invalid_argument if the
/// action is not affordable.
std::vector<std::pair<std::size_t, double>> transition(const StateSpace& space, const MdpState& s,
                                                       const MdpAction& a);

double reward(const StateSpace& space, const MdpState& s, const MdpAction& a, double eta);

struct RviParams {
  double relaxation = 0.5;      // tau
  double tolerance = 1e-6;      // omega = tolerance * (1 + |lambda|)
  int max_iterations = 100000;
  std::optional<std::size_t> reference;  // s0; default reference_state()
};

struct RviResult {
  double gain = 0.0;              // lambda, per slot
  std::vector<double> bias;       // h
  std::vector<std::size_t> policy;  // action index per state
  int iterations = 0;
  double span = 0.0;
  bool converged = false;
};

/// Explicit finite MDP: for each state a list of actions, each with a reward
/// and a sparse transition row.
struct FiniteMdp {
  struct Choice {
    double reward = 0.0;
    std::vector<std::pair<std::size_t, double>> next;
  };
  std::vector<std::vector<Choice>> states;
};

/// Relaxed relative value iteration exactly as the textbook recursion with
/// reference state s0 (default state 0).
RviResult relative_value_iteration(const FiniteMdp& mdp, const RviParams& params,
                                   const std::vector<double>* warm = nullptr);

/// Full-battery, no-arrival, lowest-channel state at the start of an epoch.
std::size_t reference_state(const StateSpace& space);

/// Same recursion on the structured model, using precomputed expectation
/// tables instead of explicit rows.
RviResult solve_mdp(const StateSpace& space, double eta, const RviParams& params,
                    const std::vector<double>* warm = nullptr);

/// The explicit form of the structured model (for cross-checks; large).
FiniteMdp explicit_mdp(const StateSpace& space, double eta, std::vector<std::vector<std::size_t>>* action_ids = nullptr);

struct PolicyEvaluation {
  double rate = 0.0;       // nats per slot
  double fronthaul = 0.0;  // data units per slot
  int iterations = 0;
};

/// Exact long-run averages of a stationary policy: stationary law of the
/// epoch-start states by power iteration, then one epoch of propagation.
PolicyEvaluation evaluate_policy(const StateSpace& space, const std::vector<std::size_t>& policy,
                                 double tolerance = 1e-12, int max_iterations = 200000);

/// Number of closed communicating classes of the policy's chain (1 == unichain).
std::size_t recurrent_classes(const StateSpace& space, const std::vector<std::size_t>& policy);

struct Calibration {
  double eta = 0.0;
  RviResult rvi;
  PolicyEvaluation eval;
  int solves = 0;
  bool unconstrained = false;  // eta = 0 already meets the budget
};

/// Smallest eta (to relative precision `eta_tol`) whose greedy policy's exact
/// fronthaul rate is at most `budget`.
Calibration calibrate_eta(const StateSpace& space, double budget, const RviParams& params,
                          double eta_tol = 1e-3);

/// CSV: state index, B, E, Y, g, n, l, transmit, power, mode.
std::string policy_csv(const StateSpace& space, const std::vector<std::size_t>& policy);

}  // namespace ffsplit
