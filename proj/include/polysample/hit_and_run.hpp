#pragma once

#include <Eigen/Dense>

#include "polysample/hpolytope.hpp"
#include "polysample/random.hpp"

namespace polysample {

/// Fraction of the chord trimmed from each end so states stay strictly
/// interior.
inline constexpr double kInteriorMargin = 1e-12;

/// One hit-and-run move: uniform direction, then a uniform point on the
/// chord through x in that direction.
template <class URBG>
Eigen::VectorXd hit_and_run_step(const HPolytope& P, const Eigen::VectorXd& x, URBG& rng) {
  const Eigen::VectorXd v = random_direction(rng, P.dim());
  const auto [t0, t1] = chord_intersection(P, x, v);
  const double eps = kInteriorMargin * (t1 - t0);
  const double t = uniform(rng, t0 + eps, t1 - eps);
  return x + t * v;
}

}  // namespace polysample
