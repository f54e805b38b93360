#pragma once

// Throughput-optimal policy for one energy budget spent over a horizon with a
// constant channel, under an average fronthaul budget. Two modes are handled
// by an exact case analysis; larger catalogs by enumerating every pair.

#include <limits>
#include <string_view>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

enum class Regime {
  Idle,                // nothing to transmit (E = 0, D = 0 or T = 0)
  GlueBurst,           // single mode at its glue-pouring power
  FullHorizon,         // single mode over the whole horizon, power rises with E
  FronthaulMode1,      // mode 1 pinned at D*T/R1 slots, power rises with E
  MixedAtV3,           // both modes at the shared power v3*
  MixedFullHorizon,    // both modes fill the horizon, power rises with E
  FronthaulMode2,      // mode 2 pinned at D*T/R2 slots, power rises with E
};

std::string_view regime_name(Regime r);

struct SingleEpochProblem {
  double energy = 0.0;   // E
  double horizon = 0.0;  // T, slots
  double gain = 0.0;     // gamma
  double budget = 0.0;   // D, data units per slot
  SplitMode mode1;       // higher fronthaul rate, lower processing power
  SplitMode mode2;
  double max_power = std::numeric_limits<double>::infinity();
};

struct SingleEpochPolicy {
  std::vector<double> durations;  // per catalog mode
  std::vector<double> powers;
  double throughput = 0.0;        // nats
  Regime regime = Regime::Idle;
  bool power_capped = false;
};

/// Unique v >= 0 with (1 + g v) log(1 + g v) - g v = g * eps.
double glue_pour_power(double gain, double processing_power);

/// Effective processing power at which two modes mixed along the fronthaul
/// equality behave like a single glue-pouring mode.
double mixed_processing_power(const SplitMode& mode1, const SplitMode& mode2);

/// Shared optimal power when mode1 and mode2 are mixed.
double v3_power(double gain, const SplitMode& mode1, const SplitMode& mode2);

/// Two-mode policy; durations/powers are indexed {mode1, mode2}.
SingleEpochPolicy single_epoch_policy(const SingleEpochProblem& prob);

/// Single-mode policy (glue pouring with the duration cap min(D*T/R, T)).
SingleEpochPolicy single_mode_policy(double energy, double horizon, double gain, double budget,
                                     const SplitMode& mode,
                                     double max_power = std::numeric_limits<double>::infinity());

/// Best of all singletons and pairs of the catalog; durations/powers are
/// indexed by catalog position.
SingleEpochPolicy best_pair_policy(double energy, double horizon, double gain, double budget,
                                   const ModeCatalog& catalog,
                                   double max_power = std::numeric_limits<double>::infinity());

}  // namespace ffsplit
