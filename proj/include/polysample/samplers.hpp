#pragma once

// Toric-symplectic Markov chains on polygon space: hit-and-run on the
// moment polytope, uniform resampling of the dihedral torus, edge
// permutations, start points, and a chain driver that records observables.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polysample/action_angle.hpp"
#include "polysample/geometry.hpp"
#include "polysample/hit_and_run.hpp"
#include "polysample/hpolytope.hpp"
#include "polysample/polytope.hpp"
#include "polysample/random.hpp"
#include "polysample/triangulation.hpp"

namespace polysample {

struct ChainCounters {
  std::uint64_t polytope_steps = 0;
  std::uint64_t hit_and_run_moves = 0;
  std::uint64_t dihedral_steps = 0;
  std::uint64_t permutation_steps = 0;
  std::uint64_t permutation_rejections = 0;
};

/// hr_multiplicity hit-and-run moves on d; theta untouched.
template <class URBG>
void moment_polytope_step(ActionAngle& aa, const HPolytope& P, int hr_multiplicity, URBG& rng,
                          ChainCounters* counters = nullptr) {
  for (int k = 0; k < hr_multiplicity; ++k) aa.d = hit_and_run_step(P, aa.d, rng);
  if (counters) {
    ++counters->polytope_steps;
    counters->hit_and_run_moves += static_cast<std::uint64_t>(hr_multiplicity);
  }
}

/// Every theta_i redrawn uniformly on [0, 2 pi); d untouched.
template <class URBG>
void dihedral_step(ActionAngle& aa, URBG& rng, ChainCounters* counters = nullptr) {
  for (Eigen::Index i = 0; i < aa.theta.size(); ++i) aa.theta[i] = uniform_angle(rng);
  if (counters) ++counters->dihedral_steps;
}

/// With probability beta a moment-polytope step, otherwise a dihedral step.
/// beta = 1 and beta = 0 select one kind deterministically.
template <class URBG>
void tsmcmc_step(ActionAngle& aa, const HPolytope& P, double beta, int hr_multiplicity, URBG& rng,
                 ChainCounters* counters = nullptr) {
  if (uniform01(rng) < beta) {
    moment_polytope_step(aa, P, hr_multiplicity, rng, counters);
  } else {
    dihedral_step(aa, rng, counters);
  }
}

/// Uniformly random permutation of the edges that maps each edge to one of
/// the same length.
template <class URBG>
std::vector<int> random_class_permutation(const EdgeLengths& r, URBG& rng) {
  std::map<double, std::vector<int>> classes;
  for (int i = 0; i < r.size(); ++i) classes[r[static_cast<std::size_t>(i)]].push_back(i);
  std::vector<int> sigma(static_cast<std::size_t>(r.size()));
  for (auto& [len, members] : classes) {
    std::vector<int> image = members;
    for (std::size_t i = image.size(); i > 1; --i) std::swap(image[i - 1], image[uniform_index(rng, i)]);
    for (std::size_t i = 0; i < members.size(); ++i) sigma[static_cast<std::size_t>(members[i])] = image[i];
  }
  return sigma;
}

/// Rebuild the polygon, permute its edges within equal-length classes and
/// read the coordinates back. A result whose diagonals are not strictly
/// inside P (or whose triangles are degenerate) is rejected and aa is left
/// unchanged. Returns whether the move was accepted.
template <class URBG>
bool permutation_step(ActionAngle& aa, const Triangulation& t, const EdgeLengths& r, const HPolytope& P,
                      URBG& rng, ChainCounters* counters = nullptr) {
  if (counters) ++counters->permutation_steps;
  const Polygon p = build_polygon(t, r, aa);
  const Polygon q = permute_edges(p, random_class_permutation(r, rng));
  try {
    ActionAngle next = recover_coordinates(t, q);
    if (!P.strictly_contains(next.d)) throw DegenerateGeometry("permutation_step: boundary point");
    build_polygon(t, r, next);  // chart must accept the new state
    aa = std::move(next);
    return true;
  } catch (const DegenerateGeometry&) {
    if (counters) ++counters->permutation_rejections;
    return false;
  }
}

/// With probability delta a permutation step, otherwise a TSMCMC step.
template <class URBG>
void ptsmcmc_step(ActionAngle& aa, const HPolytope& P, const Triangulation& t, const EdgeLengths& r, double beta,
                  double delta, int hr_multiplicity, URBG& rng, ChainCounters* counters = nullptr) {
  if (uniform01(rng) < delta) {
    permutation_step(aa, t, r, P, rng, counters);
  } else {
    tsmcmc_step(aa, P, beta, hr_multiplicity, rng, counters);
  }
}

/// Vertices of the planar polygon inscribed in a circle with edge lengths r
/// in order (the regular n-gon for equilateral r).
inline Polygon cyclic_polygon(const EdgeLengths& r) {
  if (!r.closable()) throw std::invalid_argument("cyclic_polygon: edge lengths do not close up");
  const int n = r.size();
  const auto& v = r.values();
  const auto longest_it = std::max_element(v.begin(), v.end());
  const double rmax = *longest_it;
  const int m = static_cast<int>(longest_it - v.begin());
  auto half_angle_sum = [&](double R, bool skip_longest) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (!(skip_longest && i == m)) s += 2.0 * std::asin(std::min(1.0, v[static_cast<std::size_t>(i)] / (2.0 * R)));
    return s;
  };
  // Centre inside iff the full central-angle sum at R = rmax/2 reaches 2 pi.
  const bool inside = half_angle_sum(rmax / 2.0, false) >= 2.0 * std::numbers::pi;
  auto excess = [&](double R) {
    if (inside) return half_angle_sum(R, false) - 2.0 * std::numbers::pi;
    return half_angle_sum(R, true) - 2.0 * std::asin(std::min(1.0, rmax / (2.0 * R)));
  };
  double lo = rmax / 2.0;
  double hi = r.total();
  while (inside ? excess(hi) > 0.0 : excess(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool past = inside ? excess(mid) < 0.0 : excess(mid) > 0.0;
    (past ? hi : lo) = mid;
  }
  const double R = 0.5 * (lo + hi);
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(n));
  double phi = 0.0;
  for (int i = 0; i < n; ++i) {
    pts.emplace_back(R * std::cos(phi), R * std::sin(phi), 0.0);
    const double a = 2.0 * std::asin(std::min(1.0, v[static_cast<std::size_t>(i)] / (2.0 * R)));
    phi += (!inside && i == m) ? -a : a;
  }
  return Polygon(std::move(pts), true);
}

/// Diagonals of the cyclic polygon with random dihedrals, followed by one
/// accepted permutation step (up to 100 attempts).
template <class URBG>
ActionAngle start_unconfined(const Triangulation& t, const EdgeLengths& r, const HPolytope& P, URBG& rng) {
  ActionAngle aa = recover_coordinates(t, cyclic_polygon(r));
  dihedral_step(aa, rng);
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (permutation_step(aa, t, r, P, rng) && P.strictly_contains(aa.d)) return aa;
  }
  throw std::runtime_error("start_unconfined: no non-degenerate permuted start after 100 attempts");
}

/// The folded triangle: every fan diagonal equal to 1, random dihedrals.
template <class URBG>
ActionAngle start_confined(int n, URBG& rng) {
  if (n < 4) throw std::invalid_argument("start_confined: n must be at least 4");
  ActionAngle aa{Eigen::VectorXd::Ones(n - 3), Eigen::VectorXd::Zero(n - 3)};
  dihedral_step(aa, rng);
  return aa;
}

/// Closed polygon with d uniform on P (rejection) and uniform dihedrals.
template <class URBG>
std::pair<ActionAngle, Polygon> sample_polygon_direct(const Triangulation& t, const EdgeLengths& r, const HPolytope& P,
                                                      URBG& rng) {
  ActionAngle aa{rejection_sample(P, rng), Eigen::VectorXd(t.diagonal_count())};
  dihedral_step(aa, rng);
  Polygon p = build_polygon(t, r, aa);
  return {std::move(aa), std::move(p)};
}

/// Open arm with independent uniform z_i on [-r_i, r_i] and uniform azimuths.
template <class URBG>
Polygon sample_arm(const EdgeLengths& r, URBG& rng) {
  ArmCoordinates c{Eigen::VectorXd(r.size()), Eigen::VectorXd(r.size())};
  for (int i = 0; i < r.size(); ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    c.z[i] = uniform(rng, -ri, ri);
    c.theta[i] = uniform_angle(rng);
  }
  return build_arm(c, r);
}

/// Open arm whose heights z are given (for instance a hit-and-run state on
/// a slab or half-space polytope) and whose azimuths are uniform.
template <class URBG>
Polygon arm_from_heights(const Eigen::VectorXd& z, const EdgeLengths& r, URBG& rng) {
  ArmCoordinates c{z, Eigen::VectorXd(z.size())};
  for (Eigen::Index i = 0; i < z.size(); ++i) c.theta[i] = uniform_angle(rng);
  return build_arm(c, r);
}

// ---------------------------------------------------------------------------
// Chain driver

struct McmcConfig {
  int n = 0;
  std::optional<EdgeLengths> edge_lengths;  ///< equilateral when empty
  TriangulationKind triangulation = TriangulationKind::Spiral;
  std::uint64_t triangulation_seed = 0;
  double beta = 0.5;
  double delta = 0.0;
  int hr_multiplicity = 10;
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> burnin;  ///< 10 n when empty
  std::uint64_t seed = 0;
  std::optional<double> confine_radius;

  EdgeLengths lengths() const { return edge_lengths ? *edge_lengths : EdgeLengths::equilateral(n); }
  std::uint64_t burnin_steps() const { return burnin ? *burnin : 10ULL * static_cast<std::uint64_t>(n); }

  void validate() const {
    if (n < 4) throw std::invalid_argument("McmcConfig: n must be at least 4");
    if (edge_lengths && edge_lengths->size() != n) throw std::invalid_argument("McmcConfig: need n edge lengths");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("McmcConfig: beta must lie in (0, 1)");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("McmcConfig: delta must lie in [0, 1)");
    if (hr_multiplicity < 1) throw std::invalid_argument("McmcConfig: hr multiplicity must be at least 1");
    if (!lengths().closable()) throw std::invalid_argument("McmcConfig: edge lengths cannot close up");
    if (confine_radius) {
      if (triangulation != TriangulationKind::Fan) {
        throw std::invalid_argument("McmcConfig: confined runs use the fan triangulation");
      }
      if (!lengths().is_equilateral() || lengths()[0] != 1.0) {
        throw std::invalid_argument("McmcConfig: confined runs need unit edge lengths");
      }
      if (!(*confine_radius > 1.0)) {
        throw std::invalid_argument("McmcConfig: confinement radius must exceed 1 for unit edges");
      }
      if (delta != 0.0) throw std::invalid_argument("McmcConfig: permutation steps do not preserve confinement");
    }
  }
};

/// Observable evaluated on every recorded state.
struct Observable {
  std::string name;
  std::function<double(const Polygon&, const ActionAngle&)> f;
};

/// total_curvature, chord:k, squared_chord:k, zwidth, octant6.
inline Observable make_observable(const std::string& name) {
  auto parse_k = [&](std::size_t prefix) {
    const std::string digits = name.substr(prefix);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("observable '" + name + "': expected an integer after ':'");
    }
    return std::stoi(digits);
  };
  if (name == "total_curvature") {
    return {name, [](const Polygon& p, const ActionAngle&) { return total_curvature(p); }};
  }
  if (name.rfind("chord:", 0) == 0) {
    const int k = parse_k(6);
    return {name, [k](const Polygon& p, const ActionAngle&) { return chord_length(p, k); }};
  }
  if (name.rfind("squared_chord:", 0) == 0) {
    const int k = parse_k(14);
    return {name, [k](const Polygon& p, const ActionAngle&) {
              const double c = chord_length(p, k);
              return c * c;
            }};
  }
  if (name == "zwidth") return {name, [](const Polygon& p, const ActionAngle&) { return z_width(p); }};
  if (name == "octant6") {
    return {name, [](const Polygon&, const ActionAngle& aa) { return dihedral_octant_indicator(aa) ? 1.0 : 0.0; }};
  }
  throw std::invalid_argument("unknown observable '" + name +
                              "' (expected total_curvature, chord:k, squared_chord:k, zwidth, octant6)");
}

struct ChainResult {
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  ///< one per observable, length steps
  ChainCounters counters;
  ActionAngle final_state;
  double wall_seconds = 0.0;
};

/// Sampler context shared by every step of a chain.
struct ChainContext {
  Triangulation triangulation;
  EdgeLengths r;
  HPolytope polytope;

  static ChainContext from_config(const McmcConfig& c) {
    const EdgeLengths r = c.lengths();
    Triangulation t = make_triangulation(c.triangulation, c.n, c.triangulation_seed);
    HPolytope P = c.confine_radius ? confined_fan_polytope(c.n, r, *c.confine_radius) : triangulation_polytope(t, r);
    return {std::move(t), r, std::move(P)};
  }
};

/// Called with (step index, polygon, coordinates) for every recorded state.
using SampleSink = std::function<void(std::uint64_t, const Polygon&, const ActionAngle&)>;

/// Runs burnin + steps chain steps from the start recipe for the config and
/// records every observable after each post-burnin step. Any failure is
/// rethrown with the step index.
inline ChainResult run_chain(const McmcConfig& config, const std::vector<Observable>& observables,
                             const SampleSink& sink = {}) {
  config.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const ChainContext ctx = ChainContext::from_config(config);
  Rng rng = make_rng(config.seed);

  ChainResult out;
  for (const auto& o : observables) out.names.push_back(o.name);
  out.series.assign(observables.size(), {});
  for (auto& s : out.series) s.reserve(static_cast<std::size_t>(config.steps));

  ActionAngle aa = config.confine_radius ? start_confined(config.n, rng)
                                         : start_unconfined(ctx.triangulation, ctx.r, ctx.polytope, rng);
  if (!ctx.polytope.strictly_contains(aa.d)) throw std::runtime_error("run_chain: start point is not interior");

  const std::uint64_t burnin = config.burnin_steps();
  const std::uint64_t total = burnin + config.steps;
  for (std::uint64_t step = 0; step < total; ++step) {
    try {
      ptsmcmc_step(aa, ctx.polytope, ctx.triangulation, ctx.r, config.beta, config.delta, config.hr_multiplicity, rng,
                   &out.counters);
      if (step < burnin) continue;
      const Polygon p = build_polygon(ctx.triangulation, ctx.r, aa);
      if (config.confine_radius && max_distance_from_first(p) > *config.confine_radius + 1e-9) {
        throw std::runtime_error("confinement violated");
      }
      for (std::size_t k = 0; k < observables.size(); ++k) out.series[k].push_back(observables[k].f(p, aa));
      if (sink) sink(step - burnin, p, aa);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_chain: step " + std::to_string(step) + ": " + e.what());
    }
  }
  out.final_state = std::move(aa);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return out;
}

}  // namespace polysample
