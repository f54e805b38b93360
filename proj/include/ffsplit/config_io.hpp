#pragma once

// Config files are JSON with // and /* */ comments allowed. Quantities may be
// given in per-slot units ("capacity", "budget", "fronthaul") or in physical
// units converted by time.slot_seconds ("capacity_j", "budget_mbps",
// "fronthaul_mbps"). Output always uses per-slot units, so that
// parse(dump(cfg)) == cfg.
//
//   {
//     "time":     {"slots_per_block": 4, "blocks_per_epoch": 2, "epochs": 8, "slot_seconds": 10},
//     "battery":  {"capacity_j": 1000},
//     "power":    {"max": 20},
//     "fronthaul": {"budget_mbps": 360},
//     "modes": [{"fronthaul_mbps": 983, "processing": 2}, ...],
//     "channel":  {"rayleigh": {"mean_gain": 2, "levels": 4, "users": 2}}
//                 or {"gains": [...], "transitions": [[...]], "initial": [...]},
//     "energy":   {"poisson": {"mean": 5}}
//                 or {"markov": {"levels": [...], "transitions": [[...]], "initial": [...]}},
//     "mdp":      {"battery_levels": 0, "power_levels": 0, "relaxation": 0.5, ...},
//     "heuristic": {"good_from": -1, "lookahead_blocks": 0}
//   }

#include <string>

#include "ffsplit/model.hpp"
#include "ffsplit/offline.hpp"

namespace ffsplit {

/// Parses and validates; errors are ConfigError with the offending key path.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);
std::string dump_config(const SystemConfig& cfg);

/// Offline trace: {"energy": [E_m...], "gains": [[...] per epoch]} or
/// "channel": [[1-based state index...] per epoch] instead of "gains".
OfflineInstance parse_instance(const std::string& text, const SystemConfig& cfg);
OfflineInstance load_instance(const std::string& path, const SystemConfig& cfg);
std::string dump_instance(const OfflineInstance& inst);

std::string read_file(const std::string& path);

}  // namespace ffsplit
