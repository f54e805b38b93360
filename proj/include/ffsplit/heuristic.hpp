#pragma once

// Block-level online policy: each good block re-solves the single-epoch
// problem with the battery as the energy, the expected number of remaining
// good blocks as the horizon and a rolling fronthaul allowance.

#include <cstddef>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

struct HeuristicParams {
  std::size_t good_from = 0;         // channel indices >= good_from are good
  std::size_t lookahead = 4;         // n_heu, blocks
  double budget = 0.0;               // D, data units per slot
};

/// Defaults: good set is the upper half of the channel states, lookahead 2N.
HeuristicParams heuristic_params(const SystemConfig& cfg);

struct HeuristicState {
  double battery = 0.0;
  double fronthaul = 0.0;      // D_{n-1}, data units
  std::size_t block = 0;       // blocks already decided (n - 1)
  std::size_t block_in_epoch = 0;
};

/// Expected number of blocks in each channel state among `horizon` blocks
/// whose first block is in state `current`, from the forward recursion on
/// Pr{n, n_v, w}.
std::vector<double> expected_state_counts(const ChannelChain& chain, std::size_t current, std::size_t horizon);

/// Expected number of good blocks (indices >= good_from) in the horizon.
double good_block_forecast(const ChannelChain& chain, std::size_t current, std::size_t horizon,
                           std::size_t good_from);

/// Integer slot counts per mode plus the (common) power, for one block.
struct BlockPlan {
  std::vector<int> slots;
  double power = 0.0;
  double planned_energy = 0.0;
  double horizon = 0.0;   // T handed to the single-epoch solver, slots
  double gain = 0.0;      // gamma_avg
  double allowance = 0.0; // d_n

  int total() const;
  double energy(const ModeCatalog& cat) const;
  double fronthaul(const ModeCatalog& cat) const;
};

/// One step of the algorithm at the start of a block. Deposits `arrival`
/// (clipped), plans the block, debits battery and credits fronthaul in `hs`.
BlockPlan heuristic_block_decision(HeuristicState& hs, std::size_t observed, double arrival,
                                   const HeuristicParams& params, const SystemConfig& cfg);

}  // namespace ffsplit
