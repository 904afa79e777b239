// Scan a hexagon chain for knots and print the first few knotted samples.
//
//   demo_knotted_hexagons [steps] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "polysample/polysample.hpp"

int main(int argc, char** argv) {
  using namespace polysample;
  McmcConfig cfg;
  cfg.n = 6;
  cfg.beta = 0.5;
  cfg.delta = 0.9;
  cfg.steps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 500000;
  cfg.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  auto rng = make_rng(cfg.seed, 1);
  std::uint64_t knots = 0;
  run_chain(cfg, {}, [&](std::uint64_t step, const Polygon& p, const ActionAngle&) {
    const mpz_class det = knot_determinant(p, rng);
    if (det == 1) return;
    if (++knots <= 3) {
      std::cout << "# step " << step << ", determinant " << det.get_str() << '\n';
      write_polygon(std::cout, p);
      std::cout << '\n';
    }
  });
  std::cout << std::setprecision(6) << knots << " knotted of " << cfg.steps << " (frequency "
            << static_cast<double>(knots) / static_cast<double>(cfg.steps) << ")\n";
}
