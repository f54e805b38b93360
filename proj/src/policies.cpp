#include "ffsplit/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace ffsplit {

MdpPolicy::MdpPolicy(std::shared_ptr<const StateSpace> space, std::vector<std::size_t> policy, std::string name)
    : space_(std::move(space)), policy_(std::move(policy)), name_(std::move(name)) {
  if (policy_.size() != space_->size()) throw std::invalid_argument("MdpPolicy: policy size mismatch");
}

MdpState MdpPolicy::observe(const SlotObservation& obs) const {
  MdpState s;
  s.battery = space_->floor_battery(obs.battery_before_arrival);
  s.channel = obs.channel;
  s.block = obs.block_in_epoch;
  s.slot = obs.slot_in_block;
  const std::size_t a = space_->arrival_index(obs.arrival, obs.arrival_state);
  if (s.block == 0 && s.slot == 0) {
    s.arrival = a;
    s.memory = space_->markov_arrivals() ? a : 0;
  } else {
    s.memory = space_->markov_arrivals() ? obs.arrival_state : 0;
  }
  return s;
}

SlotAction MdpPolicy::act(const SlotObservation& obs) {
  const MdpAction a = space_->action(policy_[space_->index(observe(obs))]);
  SlotAction out;
  if (!a.transmit) return out;
  out.transmit = true;
  out.power = space_->power_value(a.power);
  out.mode = a.mode;
  return out;
}

HeuristicPolicy::HeuristicPolicy(HeuristicParams params, std::string name)
    : params_(std::move(params)), name_(std::move(name)) {}

void HeuristicPolicy::begin_episode(const SystemConfig& cfg, const Realization&) {
  cfg_ = cfg;
  state_ = {};
  plan_ = {};
}

SlotAction HeuristicPolicy::act(const SlotObservation& obs) {
  if (obs.slot_in_block == 0) {
    // the environment is the ground truth for battery and fronthaul
    state_.battery = obs.battery_before_arrival;
    state_.fronthaul = obs.fronthaul_used;
    state_.block = obs.block;
    state_.block_in_epoch = obs.block_in_epoch;
    plan_ = heuristic_block_decision(state_, obs.channel, obs.arrival, params_, cfg_);
  }
  SlotAction out;
  int before = 0;
  for (std::size_t x = 0; x < plan_.slots.size(); ++x) {
    if (static_cast<int>(obs.slot_in_block) < before + plan_.slots[x]) {
      out.transmit = true;
      out.mode = x;
      out.power = plan_.power;
      return out;
    }
    before += plan_.slots[x];
  }
  return out;
}

OfflineInstance instance_from(const SystemConfig& cfg, const Realization& real, std::size_t first,
                              std::size_t count) {
  OfflineInstance inst;
  inst.cfg = cfg;
  inst.cfg.epochs = static_cast<int>(count);
  const auto N = static_cast<std::size_t>(cfg.blocks_per_epoch);
  for (std::size_t m = first; m < first + count; ++m) {
    inst.energy.push_back(real.arrivals.at(m));
    std::vector<double> row;
    for (std::size_t n = 0; n < N; ++n) row.push_back(cfg.channel.gains[real.channel.at(m * N + n)]);
    inst.gains.push_back(std::move(row));
  }
  return inst;
}

void OfflineRoundedPolicy::begin_episode(const SystemConfig& cfg, const Realization& real) {
  plans_.clear();
  claimed_ = relaxed_ = 0.0;
  window_ = static_cast<std::size_t>(cfg.epochs);
  for (std::size_t first = 0; first < real.epochs(); first += window_) {
    const auto inst = instance_from(cfg, real, first, std::min(window_, real.epochs() - first));
    const auto sol = solve_offline(inst);
    plans_.push_back(round_solution(sol, inst));
    claimed_ += plans_.back().throughput;
    relaxed_ += sol.throughput;
  }
}

SlotAction OfflineRoundedPolicy::act(const SlotObservation& obs) {
  SlotAction out;
  const auto& plan = plans_.at(obs.epoch / window_);
  const std::size_t m = obs.epoch % window_;
  int before = 0;
  for (std::size_t x = 0; x < plan.modes; ++x) {
    const int k = plan.slot_count(m, obs.block_in_epoch, x);
    if (static_cast<int>(obs.slot_in_block) < before + k) {
      out.transmit = plan.power(m, obs.block_in_epoch, x) > 0.0;
      out.mode = x;
      out.power = plan.power(m, obs.block_in_epoch, x);
      return out;
    }
    before += k;
  }
  return out;
}

std::unique_ptr<MdpPolicy> train_mdp_policy(const SystemConfig& cfg, const PolicyOptions& opts, Calibration* info) {
  auto space = std::make_shared<const StateSpace>(cfg);
  RviParams params;
  params.relaxation = cfg.mdp.relaxation;
  params.tolerance = cfg.mdp.tolerance;
  params.max_iterations = cfg.mdp.max_iterations;
  Calibration cal = calibrate_eta(*space, cfg.fronthaul_budget, params, opts.eta_tolerance);
  auto policy = std::make_unique<MdpPolicy>(space, cal.rvi.policy);
  if (info) *info = std::move(cal);
  return policy;
}

SystemConfig fixed_mode_config(const SystemConfig& cfg, std::size_t mode) {
  SystemConfig out = cfg;
  out.catalog = cfg.catalog.only(mode);
  return out;
}

void FixedModePolicy::begin_episode(const SystemConfig& cfg, const Realization& real) {
  inner_->begin_episode(fixed_mode_config(cfg, mode_), real);
}

SlotAction FixedModePolicy::act(const SlotObservation& obs) {
  SlotAction a = inner_->act(obs);
  a.mode = mode_;
  return a;
}

PolicyName parse_policy_name(const std::string& name, std::size_t modes) {
  static const std::pair<const char*, const char*> prefixes[] = {
      {"fixed-", "heuristic"}, {"mdp-fixed-", "mdp"}, {"offline-fixed-", "offline-rounded"}};
  if (name == "mdp" || name == "heuristic" || name == "offline-rounded") return {name, -1};
  for (const auto& [prefix, base] : prefixes) {
    const std::string p = prefix;
    if (name.rfind(p, 0) != 0) continue;
    const std::string rest = name.substr(p.size());
    if (rest.empty() || rest.size() > 3 ||
        !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }))
      break;
    const int k = std::stoi(rest);
    if (k < 1 || static_cast<std::size_t>(k) > modes)
      throw std::invalid_argument("policy '" + name + "': mode out of range 1.." + std::to_string(modes));
    return {base, k - 1};
  }
  throw std::invalid_argument("unknown policy '" + name +
                              "' (mdp, heuristic, offline-rounded, fixed-<k>, mdp-fixed-<k>, offline-fixed-<k>)");
}

std::unique_ptr<Policy> make_policy(const std::string& name, const SystemConfig& cfg, const PolicyOptions& opts) {
  const PolicyName pn = parse_policy_name(name, cfg.catalog.size());
  const SystemConfig use = pn.mode >= 0 ? fixed_mode_config(cfg, static_cast<std::size_t>(pn.mode)) : cfg;
  std::unique_ptr<Policy> p;
  if (pn.base == "mdp") {
    p = train_mdp_policy(use, opts);
  } else if (pn.base == "heuristic") {
    p = std::make_unique<HeuristicPolicy>(heuristic_params(use));
  } else {
    p = std::make_unique<OfflineRoundedPolicy>();
  }
  if (pn.mode < 0) return p;
  return std::make_unique<FixedModePolicy>(std::move(p), static_cast<std::size_t>(pn.mode), name);
}

}  // namespace ffsplit
