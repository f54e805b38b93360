#include "ffsplit/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ffsplit {

StateSpace::StateSpace(const SystemConfig& config) : cfg_(validate_config(config)) {
  markov_ = cfg_.energy.is_markov();
  const double cap = cfg_.battery_capacity;
  std::size_t nb;
  if (cfg_.mdp.battery_levels == 0) {
    step_ = 1.0;
    nb = static_cast<std::size_t>(std::floor(cap + 1e-9)) + 1;
  } else {
    nb = static_cast<std::size_t>(cfg_.mdp.battery_levels);
    step_ = cap / static_cast<double>(nb - 1);
  }
  battery_.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) battery_[i] = std::min(cap, static_cast<double>(i) * step_);

  const double pmax = cfg_.max_power;
  if (cfg_.mdp.power_levels == 0) {
    const auto np = static_cast<std::size_t>(std::floor(pmax + 1e-9));
    if (np == 0) power_.push_back(pmax);
    for (std::size_t j = 1; j <= np; ++j) power_.push_back(static_cast<double>(j));
  } else {
    const int k = cfg_.mdp.power_levels;
    for (int j = 1; j <= k; ++j) power_.push_back(pmax * j / k);
  }

  if (markov_) {
    const auto& mk = std::get<MarkovArrivals>(cfg_.energy.law);
    arrival_ = arrival_pmf(cfg_);
    next_ = mk.transitions;
  } else {
    arrival_ = arrival_pmf(cfg_);
    next_ = {arrival_.probs};
  }

  const std::size_t G = cfg_.channel.size();
  phases_ = static_cast<std::size_t>(cfg_.slots_per_epoch());
  first_ = nb * arrival_.values.size() * G;
  other_ = nb * memory_levels() * G;
  total_ = first_ + (phases_ - 1) * other_;
  if (total_ > cfg_.mdp.max_states) {
    std::ostringstream os;
    os << total_ << " states (" << nb << " battery x " << arrival_.values.size() << " arrival x "
       << memory_levels() << " memory x " << G << " channel x " << phases_
       << " slot positions) exceed the cap of " << cfg_.mdp.max_states
       << "; use coarser battery_levels";
    throw ConfigError("mdp.max_states", os.str());
  }
}

std::size_t StateSpace::unpruned_size() const {
  const std::size_t e = arrival_.values.size();
  return battery_.size() * e * e * cfg_.channel.size() * phases_;
}

std::size_t StateSpace::index(const MdpState& s) const {
  const std::size_t G = cfg_.channel.size();
  const std::size_t phase = s.block * cfg_.slots_per_block + s.slot;
  if (phase == 0) return (s.battery * arrival_.values.size() + s.arrival) * G + s.channel;
  return first_ + (phase - 1) * other_ + (s.battery * memory_levels() + s.memory) * G + s.channel;
}

MdpState StateSpace::state(std::size_t i) const {
  const std::size_t G = cfg_.channel.size();
  const auto L = static_cast<std::size_t>(cfg_.slots_per_block);
  MdpState s;
  if (i < first_) {
    s.channel = i % G;
    i /= G;
    s.arrival = i % arrival_.values.size();
    s.battery = i / arrival_.values.size();
    s.memory = markov_ ? s.arrival : 0;
    return s;
  }
  i -= first_;
  const std::size_t phase = i / other_ + 1;
  i %= other_;
  s.channel = i % G;
  i /= G;
  s.memory = i % memory_levels();
  s.battery = i / memory_levels();
  s.block = phase / L;
  s.slot = phase % L;
  return s;
}

std::size_t StateSpace::floor_battery(double energy) const {
  if (!(energy > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(std::floor(energy / step_ + 1e-9));
  return std::min(i, battery_.size() - 1);
}

std::size_t StateSpace::arrival_index(double energy, std::size_t markov_state) const {
  if (markov_) return std::min(markov_state, arrival_.values.size() - 1);
  std::size_t best = 0;
  for (std::size_t i = 1; i < arrival_.values.size(); ++i)
    if (std::abs(arrival_.values[i] - energy) < std::abs(arrival_.values[best] - energy)) best = i;
  return best;
}

MdpAction StateSpace::action(std::size_t a) const {
  if (a == 0) return {};
  --a;
  return {true, a % power_.size() + 1, a / power_.size()};
}

std::size_t StateSpace::action_index(const MdpAction& a) const {
  if (!a.transmit) return 0;
  return 1 + a.mode * power_.size() + (a.power - 1);
}

bool StateSpace::affordable(const MdpState& s, const MdpAction& a) const {
  if (!a.transmit) return true;
  if (a.mode >= cfg_.catalog.size() || a.power < 1 || a.power > power_.size()) return false;
  return power_value(a.power) + cfg_.catalog[a.mode].processing_power <= battery_[s.battery] + 1e-9;
}

namespace {

std::size_t phase_of(const StateSpace& sp, const MdpState& s) {
  return s.block * static_cast<std::size_t>(sp.config().slots_per_block) + s.slot;
}

}  // namespace

std::vector<std::pair<std::size_t, double>> transition(const StateSpace& sp, const MdpState& s,
                                                       const MdpAction& a) {
  if (!sp.affordable(s, a)) throw std::invalid_argument("transition: action is not affordable");
  const auto& cfg = sp.config();
  const auto L = static_cast<std::size_t>(cfg.slots_per_block);
  const std::size_t phase = phase_of(sp, s);
  const bool epoch_start = phase == 0;
  const double e = epoch_start ? sp.arrival_value(s.arrival) : 0.0;
  const double use = a.transmit ? sp.power_value(a.power) + cfg.catalog[a.mode].processing_power : 0.0;
  MdpState n;
  n.battery = sp.floor_battery(std::min(sp.battery_value(s.battery) + e - use, cfg.battery_capacity));
  n.memory = epoch_start ? (sp.markov_arrivals() ? s.arrival : 0) : s.memory;
  const std::size_t next = (phase + 1) % sp.phases();
  n.block = next / L;
  n.slot = next % L;

  std::vector<std::pair<std::size_t, double>> out;
  if (s.slot + 1 < L) {
    n.channel = s.channel;
    out.emplace_back(sp.index(n), 1.0);
    return out;
  }
  const auto& q = cfg.channel.transitions[s.channel];
  const auto& pe = sp.next_arrival(n.memory);
  for (std::size_t g = 0; g < q.size(); ++g) {
    if (q[g] == 0.0) continue;
    n.channel = g;
    if (next != 0) {
      out.emplace_back(sp.index(n), q[g]);
      continue;
    }
    for (std::size_t k = 0; k < pe.size(); ++k) {
      if (pe[k] == 0.0) continue;
      n.arrival = k;
      n.memory = sp.markov_arrivals() ? k : 0;
      out.emplace_back(sp.index(n), q[g] * pe[k]);
    }
  }
  return out;
}

double reward(const StateSpace& sp, const MdpState& s, const MdpAction& a, double eta) {
  if (!a.transmit) return 0.0;
  const auto& cfg = sp.config();
  return std::log1p(cfg.channel.gains[s.channel] * sp.power_value(a.power)) -
         eta * cfg.catalog[a.mode].fronthaul_rate;
}

std::size_t reference_state(const StateSpace& sp) {
  MdpState s;
  s.battery = sp.battery_levels() - 1;
  return sp.index(s);
}

namespace {

// One relaxed sweep bookkeeping shared by both solvers.
struct Sweep {
  double tau;
  double tol;
  std::size_t ref;

  // h <- (1 - tau) h + best - lambda; returns span of the change.
  double apply(std::vector<double>& h, const std::vector<double>& best, double lambda) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double next = (1.0 - tau) * h[i] + best[i] - lambda;
      const double d = next - h[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      h[i] = next;
    }
    return hi - lo;
  }
};

}  // namespace

RviResult relative_value_iteration(const FiniteMdp& mdp, const RviParams& params,
                                   const std::vector<double>* warm) {
  const std::size_t S = mdp.states.size();
  RviResult res;
  res.bias = warm && warm->size() == S ? *warm : std::vector<double>(S, 0.0);
  res.policy.assign(S, 0);
  if (S == 0) return res;
  const Sweep sw{params.relaxation, params.tolerance, params.reference.value_or(0)};
  std::vector<double> best(S);
  for (res.iterations = 1; res.iterations <= params.max_iterations; ++res.iterations) {
    for (std::size_t i = 0; i < S; ++i) {
      double b = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp.states[i].size(); ++a) {
        const auto& c = mdp.states[i][a];
        double v = c.reward;
        for (const auto& [j, p] : c.next) v += sw.tau * p * res.bias[j];
        if (v > b) {
          b = v;
          res.policy[i] = a;
        }
      }
      best[i] = b;
    }
    res.gain = best[sw.ref];
    res.span = sw.apply(res.bias, best, res.gain);
    if (res.span < sw.tol * (1.0 + std::abs(res.gain))) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(res.iterations, params.max_iterations);
  return res;
}

FiniteMdp explicit_mdp(const StateSpace& sp, double eta, std::vector<std::vector<std::size_t>>* ids) {
  FiniteMdp mdp;
  mdp.states.resize(sp.size());
  if (ids) ids->assign(sp.size(), {});
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const MdpState s = sp.state(i);
    for (std::size_t a = 0; a < sp.action_count(); ++a) {
      const MdpAction act = sp.action(a);
      if (!sp.affordable(s, act)) continue;
      mdp.states[i].push_back({reward(sp, s, act, eta), transition(sp, s, act)});
      if (ids) (*ids)[i].push_back(a);
    }
  }
  return mdp;
}

namespace {

// Decoded state attributes and the location of the continuation value
// h(next) as a function of the next battery index: table[off + b' * stride].
struct Layout {
  std::vector<std::size_t> battery, channel, arrival, phase, cont_off, cont_table;
  std::size_t stride = 0;
};

Layout make_layout(const StateSpace& sp) {
  const auto& cfg = sp.config();
  const auto L = static_cast<std::size_t>(cfg.slots_per_block);
  const std::size_t G = cfg.channel.size(), S = sp.size();
  Layout lay;
  lay.stride = sp.memory_levels() * G;
  lay.battery.resize(S);
  lay.channel.resize(S);
  lay.arrival.resize(S);
  lay.phase.resize(S);
  lay.cont_off.resize(S);
  lay.cont_table.resize(S);
  for (std::size_t i = 0; i < S; ++i) {
    const MdpState s = sp.state(i);
    const std::size_t ph = phase_of(sp, s);
    const std::size_t y = ph == 0 ? (sp.markov_arrivals() ? s.arrival : 0) : s.memory;
    lay.battery[i] = s.battery;
    lay.channel[i] = s.channel;
    lay.arrival[i] = s.arrival;
    lay.phase[i] = ph;
    if (s.slot + 1 < L) {
      // next slot of the same block: h itself, same channel
      MdpState n = s;
      n.battery = 0;
      n.memory = y;
      n.arrival = 0;
      n.block = (ph + 1) / L;
      n.slot = (ph + 1) % L;
      lay.cont_table[i] = 0;  // 0 => h
      lay.cont_off[i] = sp.index(n);
    } else {
      // block or epoch boundary: table 1 + next phase (phase 0 => epoch table)
      lay.cont_table[i] = 1 + (ph + 1) % sp.phases();
      lay.cont_off[i] = y * G + s.channel;
    }
  }
  return lay;
}

// Expected continuation tables at block starts (indexed by next phase) and at
// the epoch start, all laid out as [b'][y][g] with g the current channel.
void fill_tables(const StateSpace& sp, const std::vector<double>& h,
                 std::vector<std::vector<double>>& tables) {
  const auto& cfg = sp.config();
  const auto L = static_cast<std::size_t>(cfg.slots_per_block);
  const std::size_t G = cfg.channel.size(), B = sp.battery_levels(), Y = sp.memory_levels();
  const auto& q = cfg.channel.transitions;
  tables.resize(1 + sp.phases());
  std::vector<double> mixed(G);
  for (std::size_t ph = 0; ph < sp.phases(); ph += L) {
    auto& t = tables[1 + ph];
    t.assign(B * Y * G, 0.0);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t y = 0; y < Y; ++y) {
        // value at the next phase for each next channel
        for (std::size_t g2 = 0; g2 < G; ++g2) {
          MdpState n;
          n.battery = b;
          n.channel = g2;
          n.block = ph / L;
          n.slot = 0;
          if (ph == 0) {
            const auto& pe = sp.next_arrival(y);
            double v = 0.0;
            for (std::size_t k = 0; k < pe.size(); ++k) {
              n.arrival = k;
              v += pe[k] * h[sp.index(n)];
            }
            mixed[g2] = v;
          } else {
            n.memory = y;
            mixed[g2] = h[sp.index(n)];
          }
        }
        for (std::size_t g = 0; g < G; ++g) {
          double v = 0.0;
          for (std::size_t g2 = 0; g2 < G; ++g2) v += q[g][g2] * mixed[g2];
          t[(b * Y + y) * G + g] = v;
        }
      }
  }
}

}  // namespace

RviResult solve_mdp(const StateSpace& sp, double eta, const RviParams& params,
                    const std::vector<double>* warm) {
  const auto& cfg = sp.config();
  const std::size_t S = sp.size(), X = cfg.catalog.size(), P = sp.power_levels();
  const Layout lay = make_layout(sp);

  std::vector<double> rate(cfg.channel.size() * P);
  for (std::size_t g = 0; g < cfg.channel.size(); ++g)
    for (std::size_t p = 0; p < P; ++p) rate[g * P + p] = std::log1p(cfg.channel.gains[g] * sp.power_value(p + 1));

  std::vector<double> power(P);
  for (std::size_t p = 0; p < P; ++p) power[p] = sp.power_value(p + 1);
  const double inv_step = 1.0 / sp.battery_step();
  const std::size_t top = sp.battery_levels() - 1;

  RviResult res;
  res.bias = warm && warm->size() == S ? *warm : std::vector<double>(S, 0.0);
  res.policy.assign(S, 0);
  const Sweep sw{params.relaxation, params.tolerance, params.reference.value_or(reference_state(sp))};
  std::vector<double> best(S);
  std::vector<std::vector<double>> tables;
  for (res.iterations = 1; res.iterations <= params.max_iterations; ++res.iterations) {
    fill_tables(sp, res.bias, tables);
    for (std::size_t i = 0; i < S; ++i) {
      const double* cont = lay.cont_table[i] == 0 ? res.bias.data() : tables[lay.cont_table[i]].data();
      cont += lay.cont_off[i];
      const double bval = sp.battery_value(lay.battery[i]);
      // B' = min(B + E - use, B_max); floor_battery and the `top` clamp apply the min
      const double stock = lay.phase[i] == 0 ? bval + sp.arrival_value(lay.arrival[i]) : bval;
      double b = sw.tau * cont[sp.floor_battery(stock) * lay.stride];
      std::size_t arg = 0;
      const double* r = rate.data() + lay.channel[i] * P;
      for (std::size_t x = 0; x < X; ++x) {
        const double eps = cfg.catalog[x].processing_power;
        const double price = eta * cfg.catalog[x].fronthaul_rate;
        for (std::size_t p = 0; p < P; ++p) {
          const double use = power[p] + eps;
          if (use > bval + 1e-9) break;
          const auto nb = static_cast<std::size_t>((stock - use) * inv_step + 1e-9);
          const double v = r[p] - price + sw.tau * cont[std::min(nb, top) * lay.stride];
          if (v > b) {
            b = v;
            arg = 1 + x * P + p;
          }
        }
      }
      best[i] = b;
      res.policy[i] = arg;
    }
    res.gain = best[sw.ref];
    res.span = sw.apply(res.bias, best, res.gain);
    if (res.span < sw.tol * (1.0 + std::abs(res.gain))) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(res.iterations, params.max_iterations);
  return res;
}

namespace {

// Policy chain in compressed rows.
struct Chain {
  std::vector<std::size_t> start, to;
  std::vector<double> prob, rate, fronthaul;
};

Chain policy_chain(const StateSpace& sp, const std::vector<std::size_t>& policy) {
  Chain c;
  const std::size_t S = sp.size();
  c.start.reserve(S + 1);
  c.rate.resize(S);
  c.fronthaul.resize(S);
  c.start.push_back(0);
  for (std::size_t i = 0; i < S; ++i) {
    const MdpState s = sp.state(i);
    const MdpAction a = sp.action(policy.at(i));
    for (const auto& [j, p] : transition(sp, s, a)) {
      c.to.push_back(j);
      c.prob.push_back(p);
    }
    c.start.push_back(c.to.size());
    c.rate[i] = reward(sp, s, a, 0.0);
    c.fronthaul[i] = a.transmit ? sp.config().catalog[a.mode].fronthaul_rate : 0.0;
  }
  return c;
}

void push(const Chain& c, const std::vector<double>& from, std::vector<double>& to) {
  std::fill(to.begin(), to.end(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i] == 0.0) continue;
    for (std::size_t k = c.start[i]; k < c.start[i + 1]; ++k) to[c.to[k]] += from[i] * c.prob[k];
  }
}

}  // namespace

PolicyEvaluation evaluate_policy(const StateSpace& sp, const std::vector<std::size_t>& policy,
                                 double tolerance, int max_iterations) {
  const Chain c = policy_chain(sp, policy);
  const std::size_t S = sp.size();
  std::size_t first = 0;
  while (first < S && sp.state(first).block == 0 && sp.state(first).slot == 0) ++first;
  std::vector<double> mu(S, 0.0), tmp(S);
  for (std::size_t i = 0; i < first; ++i) mu[i] = 1.0 / static_cast<double>(first);

  PolicyEvaluation ev;
  for (ev.iterations = 1; ev.iterations <= max_iterations; ++ev.iterations) {
    std::vector<double> cur = mu;
    for (std::size_t k = 0; k < sp.phases(); ++k) {
      push(c, cur, tmp);
      cur.swap(tmp);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < first; ++i) diff += std::abs(cur[i] - mu[i]);
    mu.swap(cur);
    if (diff < tolerance) break;
  }
  // one epoch from the stationary epoch-start law
  std::vector<double> cur = mu;
  for (std::size_t k = 0; k < sp.phases(); ++k) {
    for (std::size_t i = 0; i < S; ++i) {
      ev.rate += cur[i] * c.rate[i];
      ev.fronthaul += cur[i] * c.fronthaul[i];
    }
    push(c, cur, tmp);
    cur.swap(tmp);
  }
  ev.rate /= static_cast<double>(sp.phases());
  ev.fronthaul /= static_cast<double>(sp.phases());
  return ev;
}

std::size_t recurrent_classes(const StateSpace& sp, const std::vector<std::size_t>& policy) {
  const Chain c = policy_chain(sp, policy);
  const std::size_t S = sp.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  // iterative Tarjan
  std::vector<std::size_t> index(S, none), low(S), comp(S, none), stack, edge(S);
  std::vector<char> on(S, 0);
  std::vector<std::size_t> call;
  std::size_t counter = 0, comps = 0;
  for (std::size_t root = 0; root < S; ++root) {
    if (index[root] != none) continue;
    call.push_back(root);
    index[root] = low[root] = counter++;
    edge[root] = c.start[root];
    stack.push_back(root);
    on[root] = 1;
    while (!call.empty()) {
      const std::size_t v = call.back();
      if (edge[v] < c.start[v + 1]) {
        const std::size_t w = c.to[edge[v]++];
        if (index[w] == none) {
          index[w] = low[w] = counter++;
          edge[w] = c.start[w];
          stack.push_back(w);
          on[w] = 1;
          call.push_back(w);
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      call.pop_back();
      if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[v]);
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
    }
  }
  std::vector<char> leaks(comps, 0);
  for (std::size_t v = 0; v < S; ++v)
    for (std::size_t k = c.start[v]; k < c.start[v + 1]; ++k)
      if (comp[c.to[k]] != comp[v]) leaks[comp[v]] = 1;
  return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), 0));
}

Calibration calibrate_eta(const StateSpace& sp, double budget, const RviParams& params, double eta_tol) {
  const auto& cfg = sp.config();
  const double slack = 1e-9 * (1.0 + budget);
  Calibration cal;
  auto attempt = [&](double eta, const std::vector<double>* warm) {
    Calibration c;
    c.eta = eta;
    c.rvi = solve_mdp(sp, eta, params, warm);
    c.eval = evaluate_policy(sp, c.rvi.policy);
    return c;
  };
  cal = attempt(0.0, nullptr);
  int solves = 1;
  if (cal.eval.fronthaul <= budget + slack) {
    cal.unconstrained = true;
    cal.solves = solves;
    return cal;
  }
  // a price at which one slot of the best rate no longer pays for the
  // cheapest fronthaul, scaled down as the starting guess
  const double top = std::log1p(cfg.channel.gains.back() * cfg.max_power);
  double lo = 0.0, hi = 1e-3 * top / cfg.catalog.max_rate();
  Calibration best = attempt(hi, &cal.rvi.bias);
  ++solves;
  std::vector<double> warm = best.rvi.bias;
  while (best.eval.fronthaul > budget + slack && solves < 80) {
    lo = hi;
    hi *= 2.0;
    best = attempt(hi, &warm);
    warm = best.rvi.bias;
    ++solves;
  }
  while (hi - lo > eta_tol * hi && solves < 200) {
    const double mid = 0.5 * (lo + hi);
    Calibration c = attempt(mid, &warm);
    warm = c.rvi.bias;
    ++solves;
    if (c.eval.fronthaul <= budget + slack) {
      hi = mid;
      best = std::move(c);
    } else {
      lo = mid;
    }
  }
  best.solves = solves;
  return best;
}

std::string policy_csv(const StateSpace& sp, const std::vector<std::size_t>& policy) {
  std::ostringstream os;
  os << "state,battery,arrival,memory,channel,block,slot,transmit,power,mode\n";
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const MdpState s = sp.state(i);
    const MdpAction a = sp.action(policy.at(i));
    const bool start = s.block == 0 && s.slot == 0;
    os << i << ',' << sp.battery_value(s.battery) << ',' << (start ? sp.arrival_value(s.arrival) : 0.0) << ','
       << s.memory << ',' << s.channel + 1 << ',' << s.block + 1 << ',' << s.slot + 1 << ','
       << (a.transmit ? 1 : 0) << ',' << (a.transmit ? sp.power_value(a.power) : 0.0) << ','
       << (a.transmit ? sp.config().catalog[a.mode].id : 0) << '\n';
  }
  return os.str();
}

}  // namespace ffsplit
