#include "ffsplit/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ffsplit/channel.hpp"
#include "json.hpp"

namespace ffsplit {

using json = nlohmann::json;

namespace {

// Reads typed fields out of one JSON object, remembering which keys were
// used so that typos surface as errors.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), at(key));
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<int>();
  }
  std::vector<double> vec(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(at(key), "missing");
    return as_vector(j_.at(key), at(key));
  }
  std::vector<std::vector<double>> matrix(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(at(key), "missing");
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_vector(v[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
  }
  Reader child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(at(key), "missing");
    return Reader(j_.at(key), at(key));
  }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
  }
  static std::vector<double> as_vector(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Per-slot value under `key`, or a physical value under `key_alt` divided
// by (or multiplied with) the slot length.
double scaled(Reader& r, const std::string& key, const std::string& key_alt, double to_units, double fallback) {
  const bool a = r.has(key), b = r.has(key_alt);
  if (a && b) throw ConfigError(r.at(key), "give either " + key + " or " + key_alt);
  if (b) return r.number(key_alt, 0.0) * to_units;
  return r.number(key, fallback);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SystemConfig parse_config(const std::string& text) {
  const json root = parse_json(text);
  Reader r(root, "");
  SystemConfig cfg;

  if (r.has("time")) {
    Reader t = r.child("time");
    cfg.slots_per_block = t.integer("slots_per_block", cfg.slots_per_block);
    cfg.blocks_per_epoch = t.integer("blocks_per_epoch", cfg.blocks_per_epoch);
    cfg.epochs = t.integer("epochs", cfg.epochs);
    cfg.slot_seconds = t.number("slot_seconds", cfg.slot_seconds);
    t.done();
  }
  if (!(cfg.slot_seconds > 0.0)) throw ConfigError("time.slot_seconds", "must be > 0");
  const double s = cfg.slot_seconds;
  if (r.has("battery")) {
    Reader b = r.child("battery");
    cfg.battery_capacity = scaled(b, "capacity", "capacity_j", 1.0 / s, cfg.battery_capacity);
    b.done();
  }
  if (r.has("power")) {
    Reader p = r.child("power");
    cfg.max_power = p.number("max", cfg.max_power);
    p.done();
  }
  if (r.has("fronthaul")) {
    Reader f = r.child("fronthaul");
    cfg.fronthaul_budget = scaled(f, "budget", "budget_mbps", s, cfg.fronthaul_budget);
    f.done();
  }

  if (r.has("modes")) {
    const json& modes = r.raw("modes");
    if (!modes.is_array()) throw ConfigError("modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      Reader m(modes[i], "modes[" + std::to_string(i) + "]");
      SplitMode mode;
      mode.id = m.integer("id", static_cast<int>(i) + 1);
      if (!m.has("fronthaul") && !m.has("fronthaul_mbps")) throw ConfigError(m.at("fronthaul"), "missing");
      mode.fronthaul_rate = scaled(m, "fronthaul", "fronthaul_mbps", s, 0.0);
      if (!m.has("processing")) throw ConfigError(m.at("processing"), "missing");
      mode.processing_power = m.number("processing", 0.0);
      m.done();
      cfg.catalog.modes.push_back(mode);
    }
  } else {
    cfg.catalog = nominal_mode_table(s);
  }

  if (r.has("channel")) {
    Reader c = r.child("channel");
    if (c.has("rayleigh")) {
      Reader ray = c.child("rayleigh");
      const double mean = ray.number("mean_gain", 2.0);
      const int levels = ray.integer("levels", 4);
      const int users = ray.integer("users", 1);
      ray.done();
      if (!(mean > 0.0)) throw ConfigError("channel.rayleigh.mean_gain", "must be > 0");
      if (levels < 1) throw ConfigError("channel.rayleigh.levels", "must be >= 1");
      if (users < 1) throw ConfigError("channel.rayleigh.users", "must be >= 1");
      if (c.has("gains")) throw ConfigError("channel.gains", "give either rayleigh or gains");
      cfg.channel = order_statistic_chain(mean, levels, users);
    } else {
      cfg.channel.gains = c.vec("gains");
      const std::size_t G = cfg.channel.gains.size();
      if (c.has("transitions")) {
        cfg.channel.transitions = c.matrix("transitions");
      } else {
        cfg.channel.transitions.assign(G, std::vector<double>(G, G ? 1.0 / static_cast<double>(G) : 0.0));
      }
      cfg.channel.initial = c.has("initial") ? c.vec("initial") : cfg.channel.stationary();
    }
    c.done();
  } else {
    cfg.channel = order_statistic_chain(2.0, 4, 2);
  }

  if (r.has("energy")) {
    Reader e = r.child("energy");
    if (e.has("poisson")) {
      Reader p = e.child("poisson");
      cfg.energy.law = PoissonArrivals{p.number("mean", 5.0)};
      p.done();
    } else if (e.has("markov")) {
      Reader m = e.child("markov");
      MarkovArrivals mk;
      mk.levels = m.vec("levels");
      mk.transitions = m.matrix("transitions");
      mk.initial = m.vec("initial");
      m.done();
      cfg.energy.law = mk;
    } else {
      throw ConfigError("energy", "expected poisson or markov");
    }
    e.done();
  } else {
    cfg.energy.law = PoissonArrivals{5.0};
  }

  if (r.has("mdp")) {
    Reader m = r.child("mdp");
    cfg.mdp.battery_levels = m.integer("battery_levels", cfg.mdp.battery_levels);
    cfg.mdp.power_levels = m.integer("power_levels", cfg.mdp.power_levels);
    cfg.mdp.relaxation = m.number("relaxation", cfg.mdp.relaxation);
    cfg.mdp.tolerance = m.number("tolerance", cfg.mdp.tolerance);
    cfg.mdp.max_iterations = m.integer("max_iterations", cfg.mdp.max_iterations);
    const double cap = m.number("max_states", static_cast<double>(cfg.mdp.max_states));
    if (!(cap >= 1.0)) throw ConfigError("mdp.max_states", "must be >= 1");
    cfg.mdp.max_states = static_cast<std::size_t>(cap);
    m.done();
  }
  if (r.has("heuristic")) {
    Reader h = r.child("heuristic");
    cfg.heuristic.good_from = h.integer("good_from", cfg.heuristic.good_from);
    cfg.heuristic.lookahead_blocks = h.integer("lookahead_blocks", cfg.heuristic.lookahead_blocks);
    h.done();
  }
  r.done();
  validate_config(cfg);
  return cfg;
}

SystemConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string dump_config(const SystemConfig& cfg) {
  json j;
  j["time"] = {{"slots_per_block", cfg.slots_per_block},
               {"blocks_per_epoch", cfg.blocks_per_epoch},
               {"epochs", cfg.epochs},
               {"slot_seconds", cfg.slot_seconds}};
  j["battery"] = {{"capacity", cfg.battery_capacity}};
  j["power"] = {{"max", cfg.max_power}};
  j["fronthaul"] = {{"budget", cfg.fronthaul_budget}};
  j["modes"] = json::array();
  for (const auto& m : cfg.catalog.modes)
    j["modes"].push_back({{"id", m.id}, {"fronthaul", m.fronthaul_rate}, {"processing", m.processing_power}});
  j["channel"] = {{"gains", cfg.channel.gains},
                  {"transitions", cfg.channel.transitions},
                  {"initial", cfg.channel.initial}};
  if (const auto* p = std::get_if<PoissonArrivals>(&cfg.energy.law)) {
    j["energy"] = {{"poisson", {{"mean", p->mean}}}};
  } else {
    const auto& mk = std::get<MarkovArrivals>(cfg.energy.law);
    j["energy"] = {{"markov", {{"levels", mk.levels}, {"transitions", mk.transitions}, {"initial", mk.initial}}}};
  }
  j["mdp"] = {{"battery_levels", cfg.mdp.battery_levels},
              {"power_levels", cfg.mdp.power_levels},
              {"relaxation", cfg.mdp.relaxation},
              {"tolerance", cfg.mdp.tolerance},
              {"max_iterations", cfg.mdp.max_iterations},
              {"max_states", cfg.mdp.max_states}};
  j["heuristic"] = {{"good_from", cfg.heuristic.good_from}, {"lookahead_blocks", cfg.heuristic.lookahead_blocks}};
  return j.dump(2) + "\n";
}

OfflineInstance parse_instance(const std::string& text, const SystemConfig& cfg) {
  const json root = parse_json(text);
  Reader r(root, "");
  OfflineInstance inst;
  inst.cfg = cfg;
  inst.energy = r.vec("energy");
  const bool by_gain = r.has("gains"), by_state = r.has("channel");
  if (by_gain == by_state) throw ConfigError("gains", "give exactly one of gains or channel");
  if (by_gain) {
    inst.gains = r.matrix("gains");
  } else {
    for (const auto& row : r.matrix("channel")) {
      std::vector<double> g;
      for (double idx : row) {
        const auto k = static_cast<std::size_t>(idx);
        if (idx < 1 || static_cast<double>(k) != idx || k > cfg.channel.size())
          throw ConfigError("channel", "state index out of range (1-based)");
        g.push_back(cfg.channel.gains[k - 1]);
      }
      inst.gains.push_back(std::move(g));
    }
  }
  r.done();
  inst.cfg.epochs = static_cast<int>(inst.energy.size());
  inst.validate();
  return inst;
}

OfflineInstance load_instance(const std::string& path, const SystemConfig& cfg) {
  return parse_instance(read_file(path), cfg);
}

std::string dump_instance(const OfflineInstance& inst) {
  json j;
  j["energy"] = inst.energy;
  j["gains"] = inst.gains;
  return j.dump(2) + "\n";
}

}  // namespace ffsplit
