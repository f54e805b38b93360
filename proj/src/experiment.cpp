#include "ffsplit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ffsplit/channel.hpp"
#include "ffsplit/config_io.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/policies.hpp"
#include "ffsplit/sim.hpp"
#include "json.hpp"

namespace ffsplit {

using json = nlohmann::json;

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "fronthaul_mbps") return SweepVariable::FronthaulMbps;
  if (name == "fronthaul") return SweepVariable::Fronthaul;
  if (name == "energy_mean") return SweepVariable::EnergyMean;
  if (name == "battery_j") return SweepVariable::BatteryJoules;
  if (name == "battery") return SweepVariable::Battery;
  throw ConfigError("variable", "unknown sweep variable '" + name +
                                    "' (fronthaul_mbps, fronthaul, energy_mean, battery_j, battery)");
}

std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::FronthaulMbps: return "fronthaul_mbps";
    case SweepVariable::Fronthaul: return "fronthaul";
    case SweepVariable::EnergyMean: return "energy_mean";
    case SweepVariable::BatteryJoules: return "battery_j";
    case SweepVariable::Battery: return "battery";
  }
  return "?";
}

SystemConfig apply_sweep(const SystemConfig& base, SweepVariable v, double value) {
  SystemConfig cfg = base;
  switch (v) {
    case SweepVariable::FronthaulMbps: cfg.fronthaul_budget = mbps_to_units(value, cfg.slot_seconds); break;
    case SweepVariable::Fronthaul: cfg.fronthaul_budget = value; break;
    case SweepVariable::EnergyMean:
      if (cfg.energy.is_markov()) throw ConfigError("variable", "energy_mean needs Poisson arrivals");
      cfg.energy.law = PoissonArrivals{value};
      break;
    case SweepVariable::BatteryJoules: cfg.battery_capacity = value / cfg.slot_seconds; break;
    case SweepVariable::Battery: cfg.battery_capacity = value; break;
  }
  validate_config(cfg);
  return cfg;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int offline_upper_mode(const std::string& name, std::size_t modes) {
  if (name == "offline-upper") return -1;
  const std::string prefix = "offline-upper-fixed-";
  if (name.rfind(prefix, 0) != 0) return -2;
  const std::string rest = name.substr(prefix.size());
  if (rest.empty() || rest.size() > 3 || rest.find_first_not_of("0123456789") != std::string::npos) return -2;
  const int k = std::stoi(rest);
  if (k < 1 || static_cast<std::size_t>(k) > modes) return -2;
  return k - 1;
}

bool is_known_policy(const std::string& name, std::size_t modes) {
  if (offline_upper_mode(name, modes) != -2) return true;
  try {
    parse_policy_name(name, modes);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

ExperimentSpec parse_experiment(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<spec>", std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<spec>", "expected an object");
  static const char* known[] = {"config", "variable", "grid", "policies", "episodes",
                                "horizon", "offline_episodes", "seed", "eta_tolerance", "threads", "fixed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      throw ConfigError(it.key(), "unknown key");
  ExperimentSpec spec;
  try {
    if (!j.contains("config")) throw ConfigError("config", "missing");
    std::filesystem::path cfg_path = j.at("config").get<std::string>();
    if (cfg_path.is_relative() && !base_dir.empty()) cfg_path = std::filesystem::path(base_dir) / cfg_path;
    spec.base = load_config(cfg_path.string());
    if (j.contains("fixed")) {
      if (!j.at("fixed").is_object()) throw ConfigError("fixed", "expected an object");
      for (auto it = j.at("fixed").begin(); it != j.at("fixed").end(); ++it) {
        if (!it.value().is_number()) throw ConfigError("fixed." + it.key(), "expected a number");
        spec.base = apply_sweep(spec.base, parse_sweep_variable(it.key()), it.value().get<double>());
      }
    }
    spec.variable = parse_sweep_variable(j.value("variable", std::string("fronthaul_mbps")));
    if (!j.contains("grid")) throw ConfigError("grid", "missing");
    spec.grid = j.at("grid").get<std::vector<double>>();
    if (!j.contains("policies")) throw ConfigError("policies", "missing");
    spec.policies = j.at("policies").get<std::vector<std::string>>();
    spec.episodes = j.value("episodes", spec.episodes);
    spec.horizon = j.value("horizon", spec.horizon);
    spec.offline_episodes = j.value("offline_episodes", spec.offline_episodes);
    spec.seed = j.value("seed", spec.seed);
    spec.eta_tolerance = j.value("eta_tolerance", spec.eta_tolerance);
    spec.threads = j.value("threads", spec.threads);
  } catch (const json::exception& e) {
    throw ConfigError("<spec>", std::string("type error: ") + e.what());
  }
  if (spec.grid.empty()) throw ConfigError("grid", "must not be empty");
  if (spec.policies.empty()) throw ConfigError("policies", "must not be empty");
  for (std::size_t i = 0; i < spec.policies.size(); ++i)
    if (!is_known_policy(spec.policies[i], spec.base.catalog.size()))
      throw ConfigError("policies[" + std::to_string(i) + "]", "unknown policy '" + spec.policies[i] + "'");
  if (spec.episodes < 1 || spec.horizon < 1 || spec.offline_episodes < 1)
    throw ConfigError("episodes", "episodes, horizon and offline_episodes must be >= 1");
  if (!(spec.eta_tolerance > 0.0)) throw ConfigError("eta_tolerance", "must be > 0");
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  return parse_experiment(read_file(path), std::filesystem::path(path).parent_path().string());
}

namespace {

ResultRow run_point(const ExperimentSpec& spec, double value, const std::string& name) {
  ResultRow row;
  row.variable = sweep_variable_name(spec.variable);
  row.value = value;
  row.policy = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SystemConfig cfg = apply_sweep(spec.base, spec.variable, value);
    row.budget = cfg.fronthaul_budget;
    const std::size_t M = static_cast<std::size_t>(cfg.epochs);
    const std::size_t offline_slots = M * static_cast<std::size_t>(cfg.slots_per_epoch());
    const int um = offline_upper_mode(name, cfg.catalog.size());
    if (um != -2) {
      const SystemConfig use = um >= 0 ? fixed_mode_config(cfg, static_cast<std::size_t>(um)) : cfg;
      std::vector<double> rate, fh;
      double waste = 0.0;
      for (std::size_t e = 0; e < spec.offline_episodes; ++e) {
        const Realization real = draw_realization(use, M, derive_seed(spec.seed, e));
        const auto sol = solve_offline(instance_from(use, real, 0, M));
        rate.push_back(sol.throughput / static_cast<double>(offline_slots));
        fh.push_back(sol.fronthaul_total() / static_cast<double>(offline_slots));
        for (double w : sol.waste) waste += w / static_cast<double>(offline_slots);
      }
      row.episodes = spec.offline_episodes;
      row.slots = offline_slots;
      std::tie(row.throughput, row.throughput_stderr) = mean_stderr(rate);
      std::tie(row.fronthaul, row.fronthaul_stderr) = mean_stderr(fh);
      row.waste = waste / static_cast<double>(spec.offline_episodes);
    } else {
      const PolicyName pn = parse_policy_name(name, cfg.catalog.size());
      std::unique_ptr<Policy> policy;
      if (pn.base == "mdp") {
        const SystemConfig use = pn.mode >= 0 ? fixed_mode_config(cfg, static_cast<std::size_t>(pn.mode)) : cfg;
        Calibration cal;
        std::unique_ptr<Policy> inner = train_mdp_policy(use, {spec.eta_tolerance}, &cal);
        row.eta = cal.eta;
        row.exact_rate = cal.eval.rate;
        row.exact_fronthaul = cal.eval.fronthaul;
        policy = pn.mode >= 0 ? std::make_unique<FixedModePolicy>(std::move(inner), pn.mode, name) : std::move(inner);
      } else {
        policy = make_policy(name, cfg, {spec.eta_tolerance});
      }
      const bool offline = pn.base == "offline-rounded";
      const std::size_t episodes = offline ? spec.offline_episodes : spec.episodes;
      const std::size_t slots = offline ? offline_slots : spec.horizon;
      const auto stats = evaluate(cfg, {policy.get()}, episodes, slots, spec.seed);
      const auto& st = stats.front();
      row.episodes = episodes;
      row.slots = slots;
      row.throughput = st.rate;
      row.throughput_stderr = st.rate_stderr;
      row.fronthaul = st.fronthaul;
      row.fronthaul_stderr = st.fronthaul_stderr;
      row.waste = st.overflow + st.clip_waste;
      row.clamped = st.clamped_actions;
      row.max_imbalance = st.max_imbalance;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.seconds = seconds_since(t0);
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const Progress& progress) {
  const std::size_t P = spec.policies.size();
  const std::size_t tasks = spec.grid.size() * P;
  std::vector<ResultRow> rows(tasks);
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      rows[t] = run_point(spec, spec.grid[t / P], spec.policies[t % P]);
      if (progress) {
        std::lock_guard<std::mutex> lock(report);
        progress(rows[t]);
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace ffsplit
