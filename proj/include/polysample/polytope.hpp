#pragma once

// Moment polytopes of arm and polygon spaces, and Monte Carlo volume and
// centroid oracles over them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polysample/geometry.hpp"
#include "polysample/hit_and_run.hpp"
#include "polysample/hpolytope.hpp"
#include "polysample/mcmc_stats.hpp"
#include "polysample/random.hpp"
#include "polysample/triangulation.hpp"

namespace polysample {

namespace detail {
inline Eigen::VectorXd unit(int dim, int i, double value = 1.0) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
  a[i] = value;
  return a;
}
}  // namespace detail

/// Product of intervals [-r_i, r_i]: the moment polytope of open arms.
inline HPolytope hyperbox(const EdgeLengths& r) {
  const int n = r.size();
  HPolytope P(n);
  for (int i = 0; i < n; ++i) {
    P.add_row(detail::unit(n, i), r[static_cast<std::size_t>(i)]);
    P.add_row(detail::unit(n, i, -1.0), r[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd hi = Eigen::Map<const Eigen::VectorXd>(r.values().data(), n);
  P.set_box(-hi, hi);
  return P;
}

namespace detail {
/// Box for diagonal lengths: 0 <= |v_a - v_b| <= shorter boundary path.
inline void set_diagonal_box(HPolytope& P, const std::vector<Chord>& chords, const EdgeLengths& r,
                             double cap = std::numeric_limits<double>::infinity()) {
  const int dim = static_cast<int>(chords.size());
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd hi(dim);
  const double total = r.total();
  for (int j = 0; j < dim; ++j) {
    double along = 0.0;
    for (int i = chords[static_cast<std::size_t>(j)].a; i < chords[static_cast<std::size_t>(j)].b; ++i) along += r.r(i);
    hi[j] = std::min({along, total - along, cap});
  }
  P.set_box(lo, hi);
}
}  // namespace detail

/// Fan triangulation polytope in the diagonals d_i = |v_1 - v_{i+2}|:
///   |r_1 - r_2| <= d_1 <= r_1 + r_2,
///   r_{i+2} <= d_i + d_{i+1},  |d_i - d_{i+1}| <= r_{i+2},
///   |r_n - r_{n-1}| <= d_{n-3} <= r_n + r_{n-1}.
inline HPolytope fan_polytope(int n, const EdgeLengths& r) {
  if (n < 4) throw std::invalid_argument("fan_polytope: n must be at least 4");
  if (r.size() != n) throw std::invalid_argument("fan_polytope: need n edge lengths");
  const int dim = n - 3;
  HPolytope P(dim);
  auto e = [&](int i) { return detail::unit(dim, i); };

  P.add_row(e(0), r.r(1) + r.r(2));
  P.add_row(-e(0), -std::abs(r.r(1) - r.r(2)));
  for (int i = 0; i + 1 < dim; ++i) {
    const double ri = r.r(i + 3);  // d_{i+1}, d_{i+2} and r_{i+3} in 1-indexed terms
    P.add_row(-e(i) - e(i + 1), -ri);
    P.add_row(e(i) - e(i + 1), ri);
    P.add_row(e(i + 1) - e(i), ri);
  }
  P.add_row(e(dim - 1), r.r(n) + r.r(n - 1));
  P.add_row(-e(dim - 1), -std::abs(r.r(n) - r.r(n - 1)));

  detail::set_diagonal_box(P, fan_triangulation(n).chords(), r);
  return P;
}

inline HPolytope fan_polytope(int n) { return fan_polytope(n, EdgeLengths::equilateral(n)); }

/// Fan polytope with the extra rows d_i <= R (rooted spherical confinement).
/// An infinite R adds no rows.
inline HPolytope confined_fan_polytope(int n, const EdgeLengths& r, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("confined_fan_polytope: R must be positive");
  HPolytope P = fan_polytope(n, r);
  if (std::isinf(R)) return P;
  for (int i = 0; i < P.dim(); ++i) P.add_row(detail::unit(P.dim(), i), R);
  detail::set_diagonal_box(P, fan_triangulation(n).chords(), r, R);
  return P;
}

/// Arms whose z-extent is at most h: -1 <= z_i <= 1 and
/// -h <= z_i + ... + z_j <= h for all i <= j.
inline HPolytope slab_polytope(int n, double h) {
  if (n < 1) throw std::invalid_argument("slab_polytope: n must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("slab_polytope: h must be positive");
  HPolytope P = hyperbox(EdgeLengths::equilateral(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a.segment(i, j - i + 1).setOnes();
      P.add_row(a, h);
      P.add_row(-a, h);
    }
  }
  return P;
}

/// Arms attached to a plane and staying above it: -1 <= z_i <= 1 and
/// z_1 + ... + z_j >= 0 for every j.
inline HPolytope half_space_polytope(int n) {
  if (n < 1) throw std::invalid_argument("half_space_polytope: n must be positive");
  HPolytope P = hyperbox(EdgeLengths::equilateral(n));
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a.head(j + 1).setConstant(-1.0);
    P.add_row(a, 0.0);
  }
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -1.0);
  lo[0] = 0.0;
  P.set_box(lo, Eigen::VectorXd::Ones(n));
  return P;
}

/// Triangle inequalities of every triangle of t, in t's diagonal order.
/// Sides that are polygon edges are constants and move to the right-hand
/// side; rows with no diagonal at all are dropped.
inline HPolytope triangulation_polytope(const Triangulation& t, const EdgeLengths& r) {
  if (r.size() != t.n()) throw std::invalid_argument("triangulation_polytope: need n edge lengths");
  const int dim = t.diagonal_count();
  HPolytope P(dim);
  for (const auto& tri : t.triangles()) {
    const Side sides[3] = {t.side(tri[0], tri[1]), t.side(tri[1], tri[2]), t.side(tri[0], tri[2])};
    for (int longest = 0; longest < 3; ++longest) {
      // sides[longest] - others <= 0
      Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
      double rhs = 0.0;
      for (int s = 0; s < 3; ++s) {
        const double sign = s == longest ? 1.0 : -1.0;
        if (sides[s].kind == Side::Kind::Diagonal) {
          a[sides[s].index] += sign;
        } else {
          rhs -= sign * r.r(sides[s].index);
        }
      }
      if (a.isZero()) {
        if (rhs < 0.0) throw std::invalid_argument("triangulation_polytope: edge lengths violate a triangle inequality");
        continue;
      }
      P.add_row(a, rhs);
    }
  }
  detail::set_diagonal_box(P, t.chords(), r);
  return P;
}

struct VolumeEstimate {
  double volume = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::size_t accepted = 0;
};

/// Hit fraction of N uniform box points, times the box volume, with the
/// binomial standard error.
template <class URBG>
VolumeEstimate rejection_volume_estimate(const HPolytope& P, URBG& rng, std::size_t N) {
  if (N == 0) throw std::invalid_argument("rejection_volume_estimate: N must be positive");
  const Eigen::VectorXd& lo = P.box_lo();
  const Eigen::VectorXd span = P.box_hi() - lo;
  const double box = P.box_volume();
  Eigen::VectorXd x(P.dim());
  std::size_t hits = 0;
  for (std::size_t s = 0; s < N; ++s) {
    for (int i = 0; i < P.dim(); ++i) x[i] = lo[i] + span[i] * uniform01(rng);
    if (P.contains(x, 0.0)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(N);
  VolumeEstimate est;
  est.volume = p * box;
  est.stderr_ = box * std::sqrt(p * (1.0 - p) / static_cast<double>(N));
  est.samples = N;
  est.accepted = hits;
  return est;
}

/// Uniform sample from P by rejection from its box; throws after
/// max_tries misses.
template <class URBG>
Eigen::VectorXd rejection_sample(const HPolytope& P, URBG& rng, std::size_t max_tries = 100000000) {
  const Eigen::VectorXd& lo = P.box_lo();
  const Eigen::VectorXd span = P.box_hi() - lo;
  Eigen::VectorXd x(P.dim());
  for (std::size_t tries = 0; tries < max_tries; ++tries) {
    for (int i = 0; i < P.dim(); ++i) x[i] = lo[i] + span[i] * uniform01(rng);
    if (P.strictly_contains(x)) return x;
  }
  throw std::runtime_error("rejection_sample: no point found; polytope may have empty interior");
}

enum class CentroidMethod { Rejection, HitAndRun };

struct CentroidEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd stderr_;
  std::size_t samples = 0;
};

/// Centroid of P. Rejection: mean of accepted box samples out of N draws,
/// standard error from the sample variance. HitAndRun: mean of N
/// hit-and-run states from a rejection-sampled start, standard error from
/// the IPS estimate of each coordinate.
template <class URBG>
CentroidEstimate centroid_estimate(const HPolytope& P, URBG& rng, std::size_t N,
                                   CentroidMethod method = CentroidMethod::Rejection) {
  if (N < 4) throw std::invalid_argument("centroid_estimate: N too small");
  const int dim = P.dim();
  CentroidEstimate est;
  if (method == CentroidMethod::Rejection) {
    const Eigen::VectorXd& lo = P.box_lo();
    const Eigen::VectorXd span = P.box_hi() - lo;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd x(dim);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < N; ++s) {
      for (int i = 0; i < dim; ++i) x[i] = lo[i] + span[i] * uniform01(rng);
      if (!P.contains(x, 0.0)) continue;
      ++hits;
      sum += x;
      sum_sq += x.cwiseAbs2();
    }
    if (hits < 2) throw std::runtime_error("centroid_estimate: too few accepted samples");
    const double h = static_cast<double>(hits);
    est.mean = sum / h;
    const Eigen::VectorXd var = (sum_sq / h - est.mean.cwiseAbs2()) * (h / (h - 1.0));
    est.stderr_ = (var.cwiseMax(0.0) / h).cwiseSqrt();
    est.samples = hits;
    return est;
  }

  std::vector<std::vector<double>> series(static_cast<std::size_t>(dim), std::vector<double>(N));
  Eigen::VectorXd x = rejection_sample(P, rng);
  for (std::size_t s = 0; s < N; ++s) {
    x = hit_and_run_step(P, x, rng);
    for (int i = 0; i < dim; ++i) series[static_cast<std::size_t>(i)][s] = x[i];
  }
  est.mean.resize(dim);
  est.stderr_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const auto summary = ips_variance(series[static_cast<std::size_t>(i)]);
    est.mean[i] = summary.mean;
    est.stderr_[i] = summary.sigma() / std::sqrt(static_cast<double>(N));
  }
  est.samples = N;
  return est;
}

}  // namespace polysample
