#pragma once

// Slot-level environment: energy deposited at epoch starts (clipped at the
// battery capacity), channel drawn per block, one policy query per slot.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

/// Everything random in one episode, drawn up front so that every policy sees
/// the same path (common random numbers).
struct Realization {
  std::vector<double> arrivals;             // per epoch, energy units
  std::vector<std::size_t> arrival_state;   // per epoch: Markov state or pmf atom
  std::vector<std::size_t> channel;         // per block (global index)

  std::size_t epochs() const { return arrivals.size(); }
};

/// Channel and energy paths come from separate streams of `seed`.
Realization draw_realization(const SystemConfig& cfg, std::size_t epochs, std::uint64_t seed);

struct SlotObservation {
  std::size_t slot = 0;            // global slot index
  std::size_t epoch = 0;
  std::size_t block = 0;           // global block index
  std::size_t block_in_epoch = 0;  // 0-based n
  std::size_t slot_in_block = 0;   // 0-based l
  std::size_t channel = 0;
  double gain = 0.0;
  double battery = 0.0;            // spendable now
  double battery_before_arrival = 0.0;
  double arrival = 0.0;            // energy arriving at this slot (epoch starts only)
  std::size_t arrival_state = 0;
  double fronthaul_used = 0.0;     // data units so far
};

struct SlotAction {
  bool transmit = false;
  double power = 0.0;
  std::size_t mode = 0;  // catalog index
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Called before the first slot; non-causal policies may read `real`.
  virtual void begin_episode(const SystemConfig& cfg, const Realization& real) {
    (void)cfg;
    (void)real;
  }
  virtual SlotAction act(const SlotObservation& obs) = 0;
};

struct SlotRecord {
  std::size_t slot = 0, epoch = 0, block = 0, channel = 0;
  double arrival = 0.0;
  bool transmit = false;
  double power = 0.0;
  std::size_t mode = 0;
  double rate = 0.0;       // nats
  double fronthaul = 0.0;  // data units
  double battery = 0.0;    // after the slot
};

struct EpisodeSummary {
  std::size_t slots = 0;
  double throughput = 0.0;      // nats, total
  double fronthaul = 0.0;       // data units, total
  double arrivals = 0.0;
  double consumed = 0.0;
  double overflow = 0.0;        // lost at deposit
  double clip_waste = 0.0;      // lost to battery quantization
  double final_battery = 0.0;
  double min_battery = 0.0;
  double max_battery = 0.0;
  std::size_t clamped_actions = 0;

  double rate_per_slot() const { return slots ? throughput / static_cast<double>(slots) : 0.0; }
  double fronthaul_per_slot() const { return slots ? fronthaul / static_cast<double>(slots) : 0.0; }
  /// arrivals - (consumed + final + overflow + clip_waste)
  double balance_error() const;
};

struct EpisodeTrace {
  std::vector<SlotRecord> records;
  EpisodeSummary summary;
};

struct RunOptions {
  bool keep_records = true;
  double battery_quantum = 0.0;  // > 0: battery floored to this grid after each slot
};

EpisodeTrace run_episode(const SystemConfig& cfg, Policy& policy, const Realization& real,
                         const RunOptions& opts = {});

/// Draws a realization covering `slots` (rounded up to whole epochs) and runs
/// exactly `slots` slots.
EpisodeTrace run_episode(const SystemConfig& cfg, Policy& policy, std::size_t slots,
                         std::uint64_t seed, const RunOptions& opts = {});

struct PolicyStats {
  std::string policy;
  std::size_t episodes = 0;
  double rate = 0.0, rate_stderr = 0.0;            // nats per slot
  double fronthaul = 0.0, fronthaul_stderr = 0.0;  // data units per slot
  double overflow = 0.0;                           // per slot
  double clip_waste = 0.0;                         // per slot
  double max_imbalance = 0.0;  // max |balance_error| / (1 + arrivals) over episodes
  std::size_t clamped_actions = 0;
  std::vector<double> episode_rates;
};

/// Common-random-number evaluation: episode e of every policy uses
/// derive_seed(seed, e).
std::vector<PolicyStats> evaluate(const SystemConfig& cfg, const std::vector<Policy*>& policies,
                                  std::size_t episodes, std::size_t slots, std::uint64_t seed,
                                  const RunOptions& opts = {});

/// Mean and standard error of a sample.
std::pair<double, double> mean_stderr(const std::vector<double>& xs);

}  // namespace ffsplit
