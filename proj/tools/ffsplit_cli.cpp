// ffsplit: command-line front end.
//
//   ffsplit validate <cfg> [--dump]
//   ffsplit solve-offline <cfg> [--trace FILE | --epochs M --seed S] [-o CSV] [--rounded CSV]
//   ffsplit train-mdp <cfg> -D <Mbit/s> [--units] [-o CSV]
//   ffsplit run <cfg> --policy NAME [--slots T] [--seed S] [-D ...] [-o CSV]
//   ffsplit sweep <spec> [--threads K] [-o CSV]
//
// CSV goes to -o (stdout by default). Every verb also writes a JSON manifest
// (seed, version, wall time, summary) to --manifest, or next to -o as
// <output>.manifest.json.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "ffsplit/channel.hpp"
#include "ffsplit/config_io.hpp"
#include "ffsplit/csv.hpp"
#include "ffsplit/experiment.hpp"
#include "ffsplit/mdp.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/policies.hpp"
#include "ffsplit/sim.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace ffsplit;

namespace {

struct Output {
  std::string csv;       // empty: stdout
  std::string manifest;  // empty: derived from csv, or none

  void write(const std::string& text) const {
    if (csv.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv);
    f << text;
  }

  void write_manifest(json m, std::chrono::steady_clock::time_point t0) const {
    const std::string path = !manifest.empty() ? manifest : csv.empty() ? std::string() : csv + ".manifest.json";
    m["version"] = library_version();
    m["compiler"] = __VERSION__;
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (path.empty()) {
      std::cerr << m.dump(2) << "\n";
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << m.dump(2) << "\n";
  }
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("-o,--output", out.csv, "CSV output file (default stdout)");
  cmd->add_option("--manifest", out.manifest, "manifest JSON file (default <output>.manifest.json)");
}

// -D override: Mbit/s unless --units
SystemConfig with_budget(SystemConfig cfg, double D, bool units) {
  if (D >= 0.0) cfg.fronthaul_budget = units ? D : mbps_to_units(D, cfg.slot_seconds);
  return validate_config(cfg);
}

json config_summary(const SystemConfig& cfg) {
  return {{"fronthaul_budget", cfg.fronthaul_budget},
          {"fronthaul_budget_mbps", units_to_mbps(cfg.fronthaul_budget, cfg.slot_seconds)},
          {"battery_capacity", cfg.battery_capacity},
          {"max_power", cfg.max_power},
          {"modes", cfg.catalog.size()},
          {"channel_states", cfg.channel.size()}};
}

json offline_summary(const OfflineSolution& sol, const IntegerSolution& rounded) {
  const double slots = static_cast<double>(sol.epochs * sol.blocks) * sol.slots_per_block;
  return {{"epochs", sol.epochs},
          {"throughput", sol.throughput},
          {"rate", sol.throughput / slots},
          {"fronthaul_rate", sol.fronthaul_total() / slots},
          {"duality_gap", sol.duality_gap},
          {"newton_steps", sol.newton_steps},
          {"converged", sol.converged},
          {"rounded_throughput", rounded.throughput},
          {"rounded_rate", rounded.throughput / slots},
          {"rounded_clip_waste", rounded.clip_waste},
          {"rounded_fell_back", rounded.fell_back}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput-maximizing transmission policies for an energy-harvesting radio unit with a flexible functional split"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());

  std::string cfg_path, trace_path, policy_name, spec_path;
  std::uint64_t seed = 1;
  std::size_t epochs = 0, slots = 10000, threads = 0;
  double D = -1.0, eta_tol = 1e-3;
  bool units = false, dump = false;
  std::string rounded_path;
  Output out;

  auto* validate = app.add_subcommand("validate", "parse and check a config");
  validate->add_option("config", cfg_path)->required()->check(CLI::ExistingFile);
  validate->add_flag("--dump", dump, "print the canonical form");

  auto* offline = app.add_subcommand("solve-offline", "non-causal optimum and its rounded plan");
  offline->add_option("config", cfg_path)->required()->check(CLI::ExistingFile);
  offline->add_option("--trace", trace_path, "energy/gain trace JSON")->check(CLI::ExistingFile);
  offline->add_option("--epochs", epochs, "sampled trace length (default: config epochs)");
  offline->add_option("--seed", seed);
  offline->add_option("-D,--budget", D, "fronthaul budget override, Mbit/s");
  offline->add_flag("--units", units, "-D is in data units per slot");
  offline->add_option("--rounded", rounded_path, "CSV for the rounded plan");
  add_output(offline, out);

  auto* train = app.add_subcommand("train-mdp", "calibrated dynamic-programming policy");
  train->add_option("config", cfg_path)->required()->check(CLI::ExistingFile);
  train->add_option("-D,--budget", D, "fronthaul budget, Mbit/s")->required();
  train->add_flag("--units", units, "-D is in data units per slot");
  train->add_option("--eta-tolerance", eta_tol);
  add_output(train, out);

  auto* run = app.add_subcommand("run", "simulate one episode and export its trace");
  run->add_option("config", cfg_path)->required()->check(CLI::ExistingFile);
  run->add_option("--policy", policy_name)->required();
  run->add_option("--slots", slots, "episode length (online policies)");
  run->add_option("--epochs", epochs, "trace length for offline-upper (default: config epochs)");
  run->add_option("--seed", seed);
  run->add_option("-D,--budget", D, "fronthaul budget override, Mbit/s");
  run->add_flag("--units", units, "-D is in data units per slot");
  run->add_option("--eta-tolerance", eta_tol);
  add_output(run, out);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep over policies");
  sweep->add_option("spec", spec_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--threads", threads, "worker threads (default: spec, then hardware)");
  add_output(sweep, out);

  CLI11_PARSE(app, argc, argv);
  const auto t0 = std::chrono::steady_clock::now();

  try {
    if (*validate) {
      const SystemConfig cfg = load_config(cfg_path);
      if (dump) std::cout << dump_config(cfg);
      else std::cout << "ok: " << config_summary(cfg).dump() << "\n";
      return 0;
    }

    if (*offline) {
      const SystemConfig cfg = with_budget(load_config(cfg_path), D, units);
      OfflineInstance inst;
      if (!trace_path.empty()) {
        inst = load_instance(trace_path, cfg);
      } else {
        const std::size_t M = epochs ? epochs : static_cast<std::size_t>(cfg.epochs);
        inst = instance_from(cfg, draw_realization(cfg, M, seed), 0, M);
      }
      const OfflineSolution sol = solve_offline(inst);
      const IntegerSolution rounded = round_solution(sol, inst);
      out.write(offline_csv(sol));
      if (!rounded_path.empty()) {
        std::ofstream f(rounded_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + rounded_path);
        f << rounded_csv(rounded, cfg.catalog);
      }
      out.write_manifest({{"verb", "solve-offline"},
                          {"config", cfg_path},
                          {"trace", trace_path},
                          {"seed", trace_path.empty() ? json(seed) : json(nullptr)},
                          {"system", config_summary(cfg)},
                          {"summary", offline_summary(sol, rounded)}},
                         t0);
      return 0;
    }

    if (*train) {
      const SystemConfig cfg = with_budget(load_config(cfg_path), D, units);
      StateSpace space(cfg);
      RviParams params;
      params.relaxation = cfg.mdp.relaxation;
      params.tolerance = cfg.mdp.tolerance;
      params.max_iterations = cfg.mdp.max_iterations;
      const Calibration cal = calibrate_eta(space, cfg.fronthaul_budget, params, eta_tol);
      out.write(policy_csv(space, cal.rvi.policy));
      out.write_manifest({{"verb", "train-mdp"},
                          {"config", cfg_path},
                          {"system", config_summary(cfg)},
                          {"summary",
                           {{"states", space.size()},
                            {"actions", space.action_count()},
                            {"eta", cal.eta},
                            {"unconstrained", cal.unconstrained},
                            {"solves", cal.solves},
                            {"gain", cal.rvi.gain},
                            {"iterations", cal.rvi.iterations},
                            {"converged", cal.rvi.converged},
                            {"rate", cal.eval.rate},
                            {"fronthaul_rate", cal.eval.fronthaul}}}},
                         t0);
      return 0;
    }

    if (*run) {
      const SystemConfig cfg = with_budget(load_config(cfg_path), D, units);
      const int um = offline_upper_mode(policy_name, cfg.catalog.size());
      if (um != -2) {
        const SystemConfig use = um >= 0 ? fixed_mode_config(cfg, static_cast<std::size_t>(um)) : cfg;
        const std::size_t M = epochs ? epochs : static_cast<std::size_t>(cfg.epochs);
        const OfflineInstance inst = instance_from(use, draw_realization(use, M, seed), 0, M);
        const OfflineSolution sol = solve_offline(inst);
        out.write(offline_csv(sol));
        out.write_manifest({{"verb", "run"},
                            {"config", cfg_path},
                            {"policy", policy_name},
                            {"seed", seed},
                            {"system", config_summary(cfg)},
                            {"summary", offline_summary(sol, round_solution(sol, inst))}},
                           t0);
        return 0;
      }
      std::unique_ptr<Policy> policy = make_policy(policy_name, cfg, {eta_tol});
      const EpisodeTrace trace = run_episode(cfg, *policy, slots, seed);
      out.write(trace_csv(trace, cfg));
      const auto& s = trace.summary;
      const double T = static_cast<double>(s.slots);
      out.write_manifest({{"verb", "run"},
                          {"config", cfg_path},
                          {"policy", policy_name},
                          {"seed", seed},
                          {"system", config_summary(cfg)},
                          {"summary",
                           {{"slots", s.slots},
                            {"rate", s.throughput / T},
                            {"fronthaul_rate", s.fronthaul / T},
                            {"arrivals", s.arrivals},
                            {"consumed", s.consumed},
                            {"overflow", s.overflow},
                            {"clip_waste", s.clip_waste},
                            {"final_battery", s.final_battery}}}},
                         t0);
      return 0;
    }

    if (*sweep) {
      ExperimentSpec spec = load_experiment(spec_path);
      if (threads) spec.threads = threads;
      const auto rows = run_experiment(spec, [](const ResultRow& r) {
        std::cerr << r.variable << "=" << r.value << " " << r.policy << ": "
                  << (r.error.empty() ? std::to_string(r.throughput) : "error: " + r.error) << " (" << r.seconds
                  << " s)\n";
      });
      out.write(results_csv(rows));
      json timing = json::array();
      std::size_t failed = 0;
      for (const auto& r : rows) {
        timing.push_back({{"value", r.value}, {"policy", r.policy}, {"seconds", r.seconds}});
        failed += !r.error.empty();
      }
      out.write_manifest({{"verb", "sweep"},
                          {"spec", spec_path},
                          {"seed", spec.seed},
                          {"episodes", spec.episodes},
                          {"horizon", spec.horizon},
                          {"offline_episodes", spec.offline_episodes},
                          {"rows", rows.size()},
                          {"failed", failed},
                          {"timing", timing}},
                         t0);
      return failed ? 3 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
