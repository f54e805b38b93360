#pragma once

// CSV writers. Column sets are fixed; new columns are only ever appended.
// Nothing timing-dependent is written, so reruns are byte-identical.
//
// results:  variable,value,policy,episodes,slots,throughput,throughput_stderr,
//           fronthaul,fronthaul_stderr,budget,waste,clamped,max_imbalance,eta,
//           exact_rate,exact_fronthaul,error
// trace:    slot,epoch,block,channel,arrival,transmit,mode,power,rate,fronthaul,battery
// offline:  epoch,block,mode,gain,duration,power,energy
// rounded:  epoch,block,mode,gain,slots,power,energy
//
// Rates are nats, fronthaul is data units, energy is energy units; mode is the
// catalog id (0 when idle). Slot, epoch, block and channel indices are 1-based.

#include <string>
#include <vector>

#include "ffsplit/experiment.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/sim.hpp"

namespace ffsplit {

std::string results_csv(const std::vector<ResultRow>& rows);
std::string trace_csv(const EpisodeTrace& trace, const SystemConfig& cfg);
std::string offline_csv(const OfflineSolution& sol);
std::string rounded_csv(const IntegerSolution& sol, const ModeCatalog& catalog);

/// Quotes a field if it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace ffsplit
