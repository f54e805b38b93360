#pragma once

// Simulator adapters for every planner, and a by-name factory.

#include <memory>
#include <string>
#include <vector>

#include "ffsplit/heuristic.hpp"
#include "ffsplit/mdp.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/sim.hpp"

namespace ffsplit {

/// Looks up the stationary MDP policy for the observed slot.
class MdpPolicy : public Policy {
 public:
  MdpPolicy(std::shared_ptr<const StateSpace> space, std::vector<std::size_t> policy, std::string name = "mdp");
  std::string name() const override { return name_; }
  SlotAction act(const SlotObservation& obs) override;
  MdpState observe(const SlotObservation& obs) const;

 private:
  std::shared_ptr<const StateSpace> space_;
  std::vector<std::size_t> policy_;
  std::string name_;
};

/// Plans each block at its first slot, then plays the plan slot by slot
/// (modes in catalog order).
class HeuristicPolicy : public Policy {
 public:
  explicit HeuristicPolicy(HeuristicParams params, std::string name = "heuristic");
  std::string name() const override { return name_; }
  void begin_episode(const SystemConfig& cfg, const Realization& real) override;
  SlotAction act(const SlotObservation& obs) override;

 private:
  HeuristicParams params_;
  std::string name_;
  SystemConfig cfg_;
  HeuristicState state_;
  BlockPlan plan_;
};

/// Solves the non-causal problem window by window (cfg.epochs epochs each)
/// on the episode's realization, rounds it and replays the integer plan.
class OfflineRoundedPolicy : public Policy {
 public:
  explicit OfflineRoundedPolicy(std::string name = "offline-rounded") : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  void begin_episode(const SystemConfig& cfg, const Realization& real) override;
  SlotAction act(const SlotObservation& obs) override;

  /// Sum of the rounded plans' claimed throughputs (nats).
  double claimed_throughput() const { return claimed_; }
  /// Sum of the continuous solutions' throughputs (nats).
  double relaxed_throughput() const { return relaxed_; }

 private:
  std::string name_;
  std::size_t window_ = 0;
  std::vector<IntegerSolution> plans_;
  double claimed_ = 0.0, relaxed_ = 0.0;
};

/// Runs `inner` on a copy of the configuration whose catalog holds only one
/// mode, and maps its actions back to that mode.
class FixedModePolicy : public Policy {
 public:
  FixedModePolicy(std::unique_ptr<Policy> inner, std::size_t mode, std::string name)
      : inner_(std::move(inner)), mode_(mode), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  void begin_episode(const SystemConfig& cfg, const Realization& real) override;
  SlotAction act(const SlotObservation& obs) override;

 private:
  std::unique_ptr<Policy> inner_;
  std::size_t mode_;
  std::string name_;
};

/// Configuration restricted to the single 0-based mode.
SystemConfig fixed_mode_config(const SystemConfig& cfg, std::size_t mode);

/// The instance covering epochs [first, first + count) of a realization.
OfflineInstance instance_from(const SystemConfig& cfg, const Realization& real, std::size_t first,
                              std::size_t count);

struct PolicyOptions {
  double eta_tolerance = 1e-3;  // relative precision of the MDP price search
};

/// Calibrates eta for cfg.fronthaul_budget and wraps the greedy policy.
std::unique_ptr<MdpPolicy> train_mdp_policy(const SystemConfig& cfg, const PolicyOptions& opts = {},
                                            Calibration* info = nullptr);

/// Known names: mdp, heuristic, offline-rounded, and the single-mode
/// variants fixed-<k> (heuristic), mdp-fixed-<k>, offline-fixed-<k> with a
/// 1-based mode k. Throws std::invalid_argument otherwise.
std::unique_ptr<Policy> make_policy(const std::string& name, const SystemConfig& cfg,
                                    const PolicyOptions& opts = {});

struct PolicyName {
  std::string base;  // mdp, heuristic or offline-rounded
  int mode = -1;     // 0-based fixed mode, -1 for the full catalog
};

/// Splits a policy name; throws std::invalid_argument for unknown names or
/// modes outside the catalog.
PolicyName parse_policy_name(const std::string& name, std::size_t modes);

}  // namespace ffsplit
