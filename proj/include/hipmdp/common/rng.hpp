#pragma once

#include <cstdint>
#include <random>

namespace hipmdp {

/// Seeded random stream. Copying an Rng duplicates its full state, which is
/// how common-random-number comparisons are set up.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next_u64() { return engine_(); }

  /// Independent child stream; the parent advances by one draw.
  Rng split() { return Rng(mix(engine_())); }

  std::mt19937_64& engine() { return engine_; }

  /// splitmix64 finalizer, used to derive stream seeds from (seed, tag).
  static std::uint64_t mix(std::uint64_t x);
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return mix(seed ^ mix(tag + 0x9e3779b97f4a7c15ULL)); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace hipmdp
