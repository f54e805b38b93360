#include "ffsplit/sim.hpp"

#include <algorithm>
#include <cmath>

#include "ffsplit/channel.hpp"

namespace ffsplit {

Realization draw_realization(const SystemConfig& cfg, std::size_t epochs, std::uint64_t seed) {
  Rng energy(seed, Stream::Energy);
  Rng channel(seed, Stream::Channel);
  Realization real;
  real.arrivals.reserve(epochs);
  real.arrival_state.reserve(epochs);
  const double cap = cfg.battery_capacity;
  if (const auto* p = std::get_if<PoissonArrivals>(&cfg.energy.law)) {
    const double quantum = cfg.slots_per_epoch();
    const auto atoms = static_cast<std::size_t>(std::ceil(cap / quantum));
    for (std::size_t m = 0; m < epochs; ++m) {
      const int a = energy.poisson(p->mean);
      real.arrivals.push_back(std::min(a * quantum, cap));
      real.arrival_state.push_back(std::min(static_cast<std::size_t>(a), atoms));
    }
  } else {
    const auto& mk = std::get<MarkovArrivals>(cfg.energy.law);
    std::size_t state = 0;
    for (std::size_t m = 0; m < epochs; ++m) {
      state = m == 0 ? energy.categorical(mk.initial) : energy.categorical(mk.transitions[state]);
      real.arrivals.push_back(std::min(mk.levels[state], cap));
      real.arrival_state.push_back(state);
    }
  }
  const std::size_t blocks = epochs * static_cast<std::size_t>(cfg.blocks_per_epoch);
  real.channel.reserve(blocks);
  std::size_t g = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    g = b == 0 ? channel.categorical(cfg.channel.initial) : channel.categorical(cfg.channel.transitions[g]);
    real.channel.push_back(g);
  }
  return real;
}

double EpisodeSummary::balance_error() const {
  return arrivals - (consumed + final_battery + overflow + clip_waste);
}

namespace {

EpisodeTrace run_slots(const SystemConfig& cfg, Policy& policy, const Realization& real,
                       std::size_t slots, const RunOptions& opts) {
  const std::size_t L = cfg.slots_per_block, N = cfg.blocks_per_epoch;
  slots = std::min(slots, real.epochs() * N * L);
  EpisodeTrace tr;
  auto& s = tr.summary;
  if (opts.keep_records) tr.records.reserve(slots);
  policy.begin_episode(cfg, real);
  const double cap = cfg.battery_capacity;
  double battery = 0.0;
  s.min_battery = s.max_battery = 0.0;
  for (std::size_t k = 0; k < slots; ++k) {
    SlotObservation obs;
    obs.slot = k;
    obs.epoch = k / (N * L);
    obs.block = k / L;
    obs.block_in_epoch = obs.block % N;
    obs.slot_in_block = k % L;
    obs.channel = real.channel[obs.block];
    obs.gain = cfg.channel.gains[obs.channel];
    obs.battery_before_arrival = battery;
    obs.arrival_state = real.arrival_state[obs.epoch];
    if (k % (N * L) == 0) {
      const double e = real.arrivals[obs.epoch];
      obs.arrival = e;
      s.arrivals += e;
      const double stored = std::min(battery + e, cap);
      s.overflow += battery + e - stored;
      battery = stored;
    }
    obs.battery = battery;
    obs.fronthaul_used = s.fronthaul;

    SlotAction a = policy.act(obs);
    SlotRecord rec;
    rec.slot = k;
    rec.epoch = obs.epoch;
    rec.block = obs.block;
    rec.channel = obs.channel;
    rec.arrival = obs.arrival;
    if (a.transmit) {
      bool clamped = false;
      if (a.mode >= cfg.catalog.size()) {
        a.transmit = false;
        clamped = true;
      } else {
        const double eps = cfg.catalog[a.mode].processing_power;
        if (!(a.power >= 0.0)) {
          a.power = 0.0;
          clamped = true;
        }
        if (a.power > cfg.max_power) {
          a.power = cfg.max_power;
          clamped = true;
        }
        if (a.power + eps > battery && a.power + eps <= battery * (1.0 + 1e-12)) {
          a.power = battery - eps;  // rounding noise, not a violation
        } else if (a.power + eps > battery) {
          clamped = true;
          if (battery > eps) {
            a.power = battery - eps;
          } else {
            a.transmit = false;
          }
        }
      }
      s.clamped_actions += clamped;
    }
    if (a.transmit) {
      const double use = a.power + cfg.catalog[a.mode].processing_power;
      battery = std::max(0.0, battery - use);
      s.consumed += use;
      rec.transmit = true;
      rec.power = a.power;
      rec.mode = a.mode;
      rec.rate = std::log1p(obs.gain * a.power);
      rec.fronthaul = cfg.catalog[a.mode].fronthaul_rate;
      s.throughput += rec.rate;
      s.fronthaul += rec.fronthaul;
    }
    if (opts.battery_quantum > 0.0) {
      const double q = opts.battery_quantum;
      const double floored = std::floor(battery / q + 1e-9) * q;
      if (floored < battery) {
        s.clip_waste += battery - floored;
        battery = floored;
      }
    }
    rec.battery = battery;
    s.min_battery = std::min(s.min_battery, battery);
    s.max_battery = std::max(s.max_battery, battery);
    if (opts.keep_records) tr.records.push_back(rec);
  }
  s.slots = slots;
  s.final_battery = battery;
  return tr;
}

}  // namespace

EpisodeTrace run_episode(const SystemConfig& cfg, Policy& policy, const Realization& real,
                         const RunOptions& opts) {
  return run_slots(cfg, policy, real, real.epochs() * cfg.slots_per_epoch(), opts);
}

EpisodeTrace run_episode(const SystemConfig& cfg, Policy& policy, std::size_t slots,
                         std::uint64_t seed, const RunOptions& opts) {
  const std::size_t per_epoch = cfg.slots_per_epoch();
  const std::size_t epochs = (slots + per_epoch - 1) / per_epoch;
  return run_slots(cfg, policy, draw_realization(cfg, epochs, seed), slots, opts);
}

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

std::vector<PolicyStats> evaluate(const SystemConfig& cfg, const std::vector<Policy*>& policies,
                                  std::size_t episodes, std::size_t slots, std::uint64_t seed,
                                  const RunOptions& opts) {
  std::vector<PolicyStats> out(policies.size());
  std::vector<std::vector<double>> fh(policies.size());
  RunOptions quiet = opts;
  quiet.keep_records = false;
  for (std::size_t e = 0; e < episodes; ++e) {
    const std::uint64_t ep_seed = derive_seed(seed, e);
    for (std::size_t i = 0; i < policies.size(); ++i) {
      auto tr = run_episode(cfg, *policies[i], slots, ep_seed, quiet);
      auto& st = out[i];
      st.episode_rates.push_back(tr.summary.rate_per_slot());
      fh[i].push_back(tr.summary.fronthaul_per_slot());
      st.overflow += tr.summary.overflow / static_cast<double>(slots);
      st.clip_waste += tr.summary.clip_waste / static_cast<double>(slots);
      st.clamped_actions += tr.summary.clamped_actions;
      st.max_imbalance =
          std::max(st.max_imbalance, std::abs(tr.summary.balance_error()) / (1.0 + tr.summary.arrivals));
    }
  }
  for (std::size_t i = 0; i < policies.size(); ++i) {
    auto& st = out[i];
    st.policy = policies[i]->name();
    st.episodes = episodes;
    std::tie(st.rate, st.rate_stderr) = mean_stderr(st.episode_rates);
    std::tie(st.fronthaul, st.fronthaul_stderr) = mean_stderr(fh[i]);
    if (episodes > 0) {
      st.overflow /= static_cast<double>(episodes);
      st.clip_waste /= static_cast<double>(episodes);
    }
  }
  return out;
}

}  // namespace ffsplit
