#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "ffsplit/closedform.hpp"
#include "ffsplit/config_io.hpp"
#include "ffsplit/csv.hpp"
#include "ffsplit/experiment.hpp"
#include "ffsplit/offline.hpp"
#include "ffsplit/policies.hpp"
#include "ffsplit/sim.hpp"

namespace py = pybind11;
using namespace ffsplit;

namespace {

py::dict summary_dict(const EpisodeSummary& s) {
  py::dict d;
  d["slots"] = s.slots;
  d["throughput"] = s.throughput;
  d["fronthaul"] = s.fronthaul;
  d["rate_per_slot"] = s.rate_per_slot();
  d["fronthaul_per_slot"] = s.fronthaul_per_slot();
  d["arrivals"] = s.arrivals;
  d["consumed"] = s.consumed;
  d["overflow"] = s.overflow;
  d["clip_waste"] = s.clip_waste;
  d["final_battery"] = s.final_battery;
  d["min_battery"] = s.min_battery;
  d["max_battery"] = s.max_battery;
  d["clamped_actions"] = s.clamped_actions;
  d["balance_error"] = s.balance_error();
  return d;
}

py::dict single_epoch_dict(const SingleEpochPolicy& p) {
  py::dict d;
  d["durations"] = p.durations;
  d["powers"] = p.powers;
  d["throughput"] = p.throughput;
  d["regime"] = std::string(regime_name(p.regime));
  d["power_capped"] = p.power_capped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ffsplit, m) {
  m.doc() = "Energy-harvesting radio unit with selectable functional splits";
  m.attr("__version__") = library_version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<SplitMode>(m, "SplitMode")
      .def(py::init<>())
      .def(py::init([](int id, double rate, double eps) { return SplitMode{id, rate, eps}; }),
           py::arg("id"), py::arg("fronthaul_rate"), py::arg("processing_power"))
      .def_readwrite("id", &SplitMode::id)
      .def_readwrite("fronthaul_rate", &SplitMode::fronthaul_rate)
      .def_readwrite("processing_power", &SplitMode::processing_power);

  py::class_<SystemConfig>(m, "SystemConfig")
      .def_readwrite("slots_per_block", &SystemConfig::slots_per_block)
      .def_readwrite("blocks_per_epoch", &SystemConfig::blocks_per_epoch)
      .def_readwrite("epochs", &SystemConfig::epochs)
      .def_readwrite("battery_capacity", &SystemConfig::battery_capacity)
      .def_readwrite("max_power", &SystemConfig::max_power)
      .def_readwrite("fronthaul_budget", &SystemConfig::fronthaul_budget)
      .def_readwrite("slot_seconds", &SystemConfig::slot_seconds)
      .def_property_readonly("modes", [](const SystemConfig& c) { return c.catalog.modes; })
      .def_property_readonly("gains", [](const SystemConfig& c) { return c.channel.gains; })
      .def_property_readonly("transitions", [](const SystemConfig& c) { return c.channel.transitions; })
      .def("validate", [](const SystemConfig& c) { validate_config(c); })
      .def("dump", &dump_config);

  m.def("nominal_config", &nominal_config, py::arg("fronthaul_mbps") = 360.0, py::arg("energy_mean") = 5.0);
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("mbps_to_units", &mbps_to_units);
  m.def("units_to_mbps", &units_to_mbps);

  m.def("glue_pour_power", &glue_pour_power, py::arg("gain"), py::arg("processing_power"));
  m.def("v3_power", &v3_power, py::arg("gain"), py::arg("mode1"), py::arg("mode2"));
  m.def(
      "best_pair_policy",
      [](double energy, double horizon, double gain, double budget, const std::vector<SplitMode>& modes,
         double max_power) { return single_epoch_dict(best_pair_policy(energy, horizon, gain, budget, {modes}, max_power)); },
      py::arg("energy"), py::arg("horizon"), py::arg("gain"), py::arg("budget"), py::arg("modes"),
      py::arg("max_power") = std::numeric_limits<double>::infinity());

  m.def(
      "solve_offline",
      [](const SystemConfig& cfg, std::vector<double> energy, std::vector<std::vector<double>> gains) {
        OfflineInstance inst;
        inst.cfg = cfg;
        inst.energy = std::move(energy);
        inst.gains = std::move(gains);
        OfflineSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_offline(inst);
        }
        py::dict d;
        d["throughput"] = sol.throughput;
        d["durations"] = sol.durations;
        d["powers"] = sol.powers;
        d["waste"] = sol.waste;
        d["battery_level"] = sol.battery_level;
        d["fronthaul_multiplier"] = sol.fronthaul_multiplier;
        d["max_residual"] = sol.residuals.worst();
        d["converged"] = sol.converged;
        d["structure_ok"] = verify_structure(sol).ok();
        d["csv"] = offline_csv(sol);
        return d;
      },
      py::arg("config"), py::arg("energy"), py::arg("gains"));

  m.def(
      "run_policy",
      [](const SystemConfig& cfg, const std::string& name, std::size_t slots, std::uint64_t seed) {
        py::gil_scoped_release release;
        auto policy = make_policy(name, cfg);
        const EpisodeTrace t = run_episode(cfg, *policy, slots, seed);
        py::gil_scoped_acquire acquire;
        return summary_dict(t.summary);
      },
      py::arg("config"), py::arg("policy"), py::arg("slots") = 10000, py::arg("seed") = 1);

  m.def(
      "run_sweep",
      [](const std::string& path, int threads) {
        ExperimentSpec spec = load_experiment(path);
        if (threads >= 0) spec.threads = static_cast<std::size_t>(threads);
        py::gil_scoped_release release;
        return results_csv(run_experiment(spec));
      },
      py::arg("spec_path"), py::arg("threads") = -1);
}
