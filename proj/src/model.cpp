#include "ffsplit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffsplit/channel.hpp"

namespace ffsplit {

namespace {

constexpr double kRowTolerance = 1e-12;

void check_stochastic_row(const std::vector<double>& row, std::size_t width,
                          const std::string& path) {
  if (row.size() != width) {
    throw ConfigError(path, "expected " + std::to_string(width) + " entries, got " +
                                std::to_string(row.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!(row[j] >= 0.0)) throw ConfigError(path + "[" + std::to_string(j) + "]", "negative probability");
    sum += row[j];
  }
  if (std::abs(sum - 1.0) > kRowTolerance) {
    throw ConfigError(path, "row sums to " + std::to_string(sum) + ", not 1");
  }
}

void check_matrix(const std::vector<std::vector<double>>& m, std::size_t n,
                  const std::string& path) {
  if (m.size() != n) {
    throw ConfigError(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(m.size()));
  }
  for (std::size_t i = 0; i < n; ++i) check_stochastic_row(m[i], n, path + "[" + std::to_string(i) + "]");
}

}  // namespace

double ModeCatalog::max_rate() const {
  double r = 0.0;
  for (const auto& m : modes) r = std::max(r, m.fronthaul_rate);
  return r;
}

double ModeCatalog::min_processing() const {
  double e = modes.empty() ? 0.0 : modes.front().processing_power;
  for (const auto& m : modes) e = std::min(e, m.processing_power);
  return e;
}

ModeCatalog ModeCatalog::only(std::size_t index) const {
  ModeCatalog c;
  c.modes.push_back(modes.at(index));
  return c;
}

std::vector<double> ChannelChain::stationary() const {
  const std::size_t g = size();
  std::vector<double> pi(g, 1.0 / static_cast<double>(g)), next(g);
  for (int it = 0; it < 100000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) next[j] += 0.5 * pi[i] * transitions[i][j];
    for (std::size_t j = 0; j < g; ++j) next[j] += 0.5 * pi[j];
    double diff = 0.0;
    for (std::size_t j = 0; j < g; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

double ArrivalPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

const SystemConfig& validate_config(const SystemConfig& cfg) {
  if (cfg.slots_per_block < 1) throw ConfigError("time.slots_per_block", "must be >= 1");
  if (cfg.blocks_per_epoch < 1) throw ConfigError("time.blocks_per_epoch", "must be >= 1");
  if (cfg.epochs < 1) throw ConfigError("time.epochs", "must be >= 1");
  if (!(cfg.slot_seconds > 0.0)) throw ConfigError("time.slot_seconds", "must be > 0");
  if (!(cfg.battery_capacity > 0.0)) throw ConfigError("battery.capacity", "must be > 0");
  if (!(cfg.max_power > 0.0)) throw ConfigError("power.max", "must be > 0");
  if (!(cfg.fronthaul_budget >= 0.0)) throw ConfigError("fronthaul.budget", "must be >= 0");

  const auto& modes = cfg.catalog.modes;
  if (modes.empty()) throw ConfigError("modes", "catalog needs at least one mode");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string p = "modes[" + std::to_string(i) + "]";
    if (!(modes[i].fronthaul_rate > 0.0)) throw ConfigError(p + ".fronthaul", "must be > 0");
    if (!(modes[i].processing_power > 0.0)) throw ConfigError(p + ".processing", "must be > 0");
    if (i > 0) {
      const auto& a = modes[i - 1];
      const auto& b = modes[i];
      if (!(a.fronthaul_rate > b.fronthaul_rate)) {
        throw ConfigError(p + ".fronthaul", "modes must be sorted by strictly decreasing fronthaul rate");
      }
      if (!(a.processing_power < b.processing_power)) {
        throw ConfigError(p + ".processing",
                          "dominated mode: lower fronthaul rate must cost strictly more processing");
      }
    }
  }

  const auto& ch = cfg.channel;
  if (ch.gains.empty()) throw ConfigError("channel.gains", "need at least one state");
  for (std::size_t g = 0; g < ch.gains.size(); ++g) {
    if (!(ch.gains[g] > 0.0)) throw ConfigError("channel.gains[" + std::to_string(g) + "]", "must be > 0");
    if (g > 0 && !(ch.gains[g] > ch.gains[g - 1])) {
      throw ConfigError("channel.gains[" + std::to_string(g) + "]", "gains must be strictly increasing");
    }
  }
  check_matrix(ch.transitions, ch.gains.size(), "channel.transitions");
  check_stochastic_row(ch.initial, ch.gains.size(), "channel.initial");

  if (const auto* p = std::get_if<PoissonArrivals>(&cfg.energy.law)) {
    if (!(p->mean > 0.0)) throw ConfigError("energy.poisson.mean", "must be > 0");
  } else {
    const auto& mk = std::get<MarkovArrivals>(cfg.energy.law);
    if (mk.levels.empty()) throw ConfigError("energy.markov.levels", "need at least one level");
    for (std::size_t e = 0; e < mk.levels.size(); ++e) {
      if (!(mk.levels[e] >= 0.0)) throw ConfigError("energy.markov.levels[" + std::to_string(e) + "]", "must be >= 0");
    }
    check_matrix(mk.transitions, mk.levels.size(), "energy.markov.transitions");
    check_stochastic_row(mk.initial, mk.levels.size(), "energy.markov.initial");
  }

  const auto& s = cfg.mdp;
  if (!(s.relaxation > 0.0 && s.relaxation < 1.0)) throw ConfigError("mdp.relaxation", "must lie in (0,1)");
  if (!(s.tolerance > 0.0)) throw ConfigError("mdp.tolerance", "must be > 0");
  if (s.battery_levels == 1 || s.battery_levels < 0) throw ConfigError("mdp.battery_levels", "must be 0 or >= 2");
  if (s.power_levels == 1 || s.power_levels < 0) throw ConfigError("mdp.power_levels", "must be 0 or >= 2");
  if (s.max_iterations < 1) throw ConfigError("mdp.max_iterations", "must be >= 1");

  const auto& h = cfg.heuristic;
  if (h.good_from >= static_cast<int>(ch.gains.size())) throw ConfigError("heuristic.good_from", "beyond last channel state");
  if (h.lookahead_blocks < 0) throw ConfigError("heuristic.lookahead_blocks", "must be >= 0");
  return cfg;
}

const char* library_version() { return FFSPLIT_VERSION; }

double mbps_to_units(double mbps, double slot_seconds) { return mbps * slot_seconds; }
double units_to_mbps(double units, double slot_seconds) { return units / slot_seconds; }

ModeCatalog nominal_mode_table(double slot_seconds) {
  ModeCatalog c;
  c.modes = {{1, mbps_to_units(983.0, slot_seconds), 2.0},
             {2, mbps_to_units(466.0, slot_seconds), 4.0},
             {3, mbps_to_units(151.0, slot_seconds), 5.0}};
  return c;
}

SystemConfig nominal_config(double fronthaul_mbps, double energy_mean) {
  SystemConfig cfg;
  cfg.slots_per_block = 4;
  cfg.blocks_per_epoch = 2;
  cfg.epochs = 8;
  cfg.slot_seconds = 10.0;
  cfg.battery_capacity = 1000.0 / cfg.slot_seconds;
  cfg.max_power = 20.0;
  cfg.fronthaul_budget = mbps_to_units(fronthaul_mbps, cfg.slot_seconds);
  cfg.catalog = nominal_mode_table(cfg.slot_seconds);
  cfg.channel = order_statistic_chain(2.0, 4, 2);
  cfg.energy.law = PoissonArrivals{energy_mean};
  return cfg;
}

ArrivalPmf arrival_pmf_given(const SystemConfig& cfg, std::size_t current_state) {
  ArrivalPmf pmf;
  const double cap = cfg.battery_capacity;
  if (const auto* p = std::get_if<PoissonArrivals>(&cfg.energy.law)) {
    const double quantum = cfg.slots_per_epoch();
    double below = 0.0;
    for (int a = 0;; ++a) {
      const double value = a * quantum;
      if (value >= cap) {
        pmf.values.push_back(cap);
        pmf.probs.push_back(std::max(0.0, 1.0 - below));
        break;
      }
      const double pr = std::exp(a * std::log(p->mean) - p->mean - std::lgamma(a + 1.0));
      pmf.values.push_back(value);
      pmf.probs.push_back(pr);
      below += pr;
    }
    return pmf;
  }
  const auto& mk = std::get<MarkovArrivals>(cfg.energy.law);
  const auto& row = mk.transitions.at(current_state);
  for (std::size_t e = 0; e < mk.levels.size(); ++e) {
    pmf.values.push_back(std::min(mk.levels[e], cap));
    pmf.probs.push_back(row[e]);
  }
  return pmf;
}

ArrivalPmf arrival_pmf(const SystemConfig& cfg) {
  if (!cfg.energy.is_markov()) return arrival_pmf_given(cfg, 0);
  const auto& mk = std::get<MarkovArrivals>(cfg.energy.law);
  ArrivalPmf pmf;
  for (std::size_t e = 0; e < mk.levels.size(); ++e) {
    pmf.values.push_back(std::min(mk.levels[e], cfg.battery_capacity));
    pmf.probs.push_back(mk.initial[e]);
  }
  return pmf;
}

double BlockAllocation::total_duration() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

double BlockAllocation::energy(const ModeCatalog& cat) const {
  double e = 0.0;
  for (std::size_t x = 0; x < durations.size(); ++x) e += durations[x] * (powers[x] + cat[x].processing_power);
  return e;
}

double BlockAllocation::fronthaul(const ModeCatalog& cat) const {
  double f = 0.0;
  for (std::size_t x = 0; x < durations.size(); ++x) f += durations[x] * cat[x].fronthaul_rate;
  return f;
}

double BlockAllocation::throughput(double gain) const {
  double h = 0.0;
  for (std::size_t x = 0; x < durations.size(); ++x) {
    if (durations[x] > 0.0) h += durations[x] * std::log1p(gain * powers[x]);
  }
  return h;
}

}  // namespace ffsplit
