#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace kentmix {

/// Mixes a base seed with a stream index (SplitMix64 finalizer) so that
/// restarts and replications get independent, order-free generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator whose variates are bit-reproducible across standard
/// libraries: the mt19937_64 engine is fully specified, and the
/// distributions below are computed here rather than by <random>'s
/// implementation-defined distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low();
  /// Standard normal (Box-Muller, one variate per call).
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Index drawn with probability proportional to weights (nonnegative, not
  /// all zero).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace kentmix
