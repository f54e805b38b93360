#include "ffsplit/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ffsplit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, Stream stream)
    : engine_(splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::categorical(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // u landed in the rounding gap above the last cumulative sum
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return 0;
}

int Rng::poisson(double mean) {
  const double u = uniform();
  double p = std::exp(-mean);
  double acc = p;
  int k = 0;
  while (u >= acc && k < 100000) {
    ++k;
    p *= mean / k;
    acc += p;
    if (p == 0.0 && k > mean) break;
  }
  return k;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<double> order_statistic_pmf(int users, int levels) {
  if (users < 1 || levels < 1) throw std::invalid_argument("order_statistic_pmf: users and levels must be >= 1");
  std::vector<double> pmf(levels);
  for (int g = 1; g <= levels; ++g) {
    pmf[g - 1] = std::pow(static_cast<double>(g) / levels, users) -
                 std::pow(static_cast<double>(g - 1) / levels, users);
  }
  return pmf;
}

std::size_t sample_best_channel(int users, int levels, Rng& rng) {
  const auto pmf = order_statistic_pmf(users, levels);
  return rng.categorical(pmf);
}

std::vector<double> quantile_gains(double mean_gain, int levels) {
  if (!(mean_gain > 0.0) || levels < 1) throw std::invalid_argument("quantile_gains: need mean > 0, levels >= 1");
  // Interval [a, b) of Exp(mean): integral of x f(x) = (a+mu)e^{-a/mu} - (b+mu)e^{-b/mu}.
  std::vector<double> out(levels);
  const double mu = mean_gain;
  auto tail_moment = [mu](double a) { return std::isinf(a) ? 0.0 : (a + mu) * std::exp(-a / mu); };
  for (int g = 0; g < levels; ++g) {
    const double a = -mu * std::log1p(-static_cast<double>(g) / levels);
    const double b = (g + 1 == levels) ? INFINITY : -mu * std::log1p(-static_cast<double>(g + 1) / levels);
    out[g] = (tail_moment(a) - tail_moment(b)) * levels;
  }
  return out;
}

ChannelChain order_statistic_chain(double mean_gain, int levels, int users) {
  ChannelChain c;
  c.gains = quantile_gains(mean_gain, levels);
  const auto pmf = order_statistic_pmf(users, levels);
  c.transitions.assign(levels, pmf);
  c.initial = pmf;
  return c;
}

double effective_gain(std::span<const double> carrier_gains) {
  if (carrier_gains.empty()) throw std::invalid_argument("effective_gain: no carriers");
  double log_sum = 0.0;
  for (double g : carrier_gains) {
    if (!(g > 0.0)) throw std::invalid_argument("effective_gain: gains must be > 0");
    log_sum += std::log(g);
  }
  return std::exp(log_sum / static_cast<double>(carrier_gains.size()));
}

double multicarrier_rate(std::span<const double> carrier_gains, double power) {
  double s = 0.0;
  for (double g : carrier_gains) s += std::log1p(g * power);
  return s / static_cast<double>(carrier_gains.size());
}

}  // namespace ffsplit
