#pragma once

// Channel and energy randomness: quantized Rayleigh gains, the best-of-U-users
// order statistic, multi-carrier aggregation, and the seeded random streams.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ffsplit/model.hpp"

namespace ffsplit {

enum class Stream : std::uint64_t { Channel = 1, Energy = 2, Policy = 3 };

/// Deterministic random stream. Streams derived from the same seed but a
/// different Stream id are independent, so channel and energy paths do not
/// depend on what a policy draws.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);
  explicit Rng(std::uint64_t seed) : Rng(seed, Stream::Policy) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Inverse-CDF draw from a discrete pmf.
  std::size_t categorical(std::span<const double> probs);
  /// Poisson draw by CDF inversion (monotone in the mean for a fixed uniform).
  int poisson(double mean);

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with an episode index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Pr{best of `users` iid quantile indices == g}, g = 1..levels.
std::vector<double> order_statistic_pmf(int users, int levels);

std::size_t sample_best_channel(int users, int levels, Rng& rng);

/// Conditional means of an exponential power gain (Rayleigh amplitude) with
/// mean `mean_gain` over `levels` equiprobable intervals.
std::vector<double> quantile_gains(double mean_gain, int levels);

/// Chain whose every row is the order-statistic pmf (iid blocks).
ChannelChain order_statistic_chain(double mean_gain, int levels, int users);

/// Single-carrier equivalent of C parallel carriers: the geometric mean gain.
double effective_gain(std::span<const double> carrier_gains);

/// Exact per-carrier average spectral efficiency (1/C) sum log(1 + g_c p).
double multicarrier_rate(std::span<const double> carrier_gains, double power);

}  // namespace ffsplit
