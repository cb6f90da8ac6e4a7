#pragma once

#include <cstdint>

namespace geoest {

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Child seed for stream `index` of `seed`. Distinct indices give
/// decorrelated child seeds; the map is stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// xoshiro256** seeded through SplitMix64.
///
/// Uniforms use the top 53 bits, shifted by half an ulp so they lie strictly
/// inside (0, 1). Normals are produced by inverting the standard normal CDF
/// (Wichura's AS241, ~1e-16 relative accuracy), one uniform per normal, so a
/// stream of normals is a fixed function of the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in the open interval (0, 1).
  double uniform();
  double normal();
  /// Standard logistic draw times `scale`.
  double logistic(double scale);
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t s_[4];
};

/// Quantile of the standard normal distribution, p in (0, 1).
double normal_quantile(double p);
/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace geoest
