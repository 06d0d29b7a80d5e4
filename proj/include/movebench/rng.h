#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace movebench {

// Seeded random stream with portable variate transforms. The raw generator
// (mt19937_64) is fully specified by the standard; the distribution
// transforms are implemented here rather than via <random> adapters, whose
// output is implementation-defined. Identical seeds therefore yield
// identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection-corrected for modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang, with the alpha<1 boost.
  double gamma(double shape);

  // Beta(alpha, beta) as Ga/(Ga+Gb).
  double beta(double alpha, double beta);

  // Uniform direction on the unit circle.
  Eigen::Vector2d unit_vector();

  // Either -1 or +1 with equal probability.
  int sign() { return (gen_() & 1u) ? 1 : -1; }

 private:
  std::mt19937_64 gen_;
};

// Derives an independent stream seed from (seed, index); splitmix64 finalizer.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace movebench
