#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace polysample {

/// Generator used by every sampler. Each chain owns one, seeded through
/// derive_seed so that independent chains get independent streams.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  const std::uint64_t s = derive_seed(seed, stream);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return Rng(seq);
}

/// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
template <class URBG>
double uniform01(URBG& rng) {
  static_assert(URBG::max() - URBG::min() == ~std::uint64_t{0}, "needs a 64-bit generator");
  return static_cast<double>((rng() - URBG::min()) >> 11) * 0x1.0p-53;
}

template <class URBG>
double uniform(URBG& rng, double a, double b) {
  return a + (b - a) * uniform01(rng);
}

template <class URBG>
double uniform_angle(URBG& rng) {
  return 2.0 * std::numbers::pi * uniform01(rng);
}

/// Uniform direction on the unit sphere in R^dim (normalized Gaussian).
template <class URBG>
Eigen::VectorXd random_direction(URBG& rng, int dim) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    norm = v.norm();
  } while (norm < 1e-300);
  return v / norm;
}

/// Uniform integer in [0, n).
template <class URBG>
std::size_t uniform_index(URBG& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace polysample
