// Monte Carlo volume and centroid of the fan moment polytope, plain and
// confined, next to the exact polygon-space volume.
//
//   demo_polytope_volume [n] [samples]

#include <cstdlib>
#include <iostream>
#include <numbers>

#include "polysample/polysample.hpp"

int main(int argc, char** argv) {
  using namespace polysample;
  const int n = argc > 1 ? std::atoi(argv[1]) : 6;
  const std::size_t samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1000000;
  auto rng = make_rng(42);

  const auto P = fan_polytope(n);
  const auto v = rejection_volume_estimate(P, rng, samples);
  // Polygon-space volume is the polytope volume times (2 pi)^(n-3).
  std::cout << "fan polytope, n = " << n << ": volume " << v.volume << " +- " << v.stderr_ << ", exact "
            << equilateral_volume(n) / std::pow(2 * std::numbers::pi, n - 3) << '\n';

  const auto c = centroid_estimate(P, rng, samples, CentroidMethod::Rejection);
  std::cout << "centroid:";
  for (Eigen::Index i = 0; i < c.mean.size(); ++i) std::cout << ' ' << c.mean[i];
  std::cout << '\n';

  const auto Q = confined_fan_polytope(n, EdgeLengths::equilateral(n), 1.5);
  const auto w = rejection_volume_estimate(Q, rng, samples);
  std::cout << "confined to radius 1.5: volume " << w.volume << " +- " << w.stderr_ << '\n';
}
