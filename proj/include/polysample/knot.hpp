#pragma once

// Knot determinant |Delta(-1)| of closed polygons from a generic planar
// projection, enough to tell trefoils (3) from unknots (1).

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "polysample/action_angle.hpp"
#include "polysample/geometry.hpp"
#include "polysample/random.hpp"
#include "polysample/samplers.hpp"

namespace polysample {

inline constexpr double kProjectionTol = 1e-9;
inline constexpr int kMaxProjectionRetries = 50;

struct Crossing {
  int over = 0;       ///< arc passing over
  int under_in = 0;   ///< under arc ending at the crossing
  int under_out = 0;  ///< under arc starting at the crossing
  int sign = 0;       ///< sign of cross(under direction, over direction) in the image plane
};

struct KnotDiagram {
  int arcs = 0;
  std::vector<Crossing> crossings;

  std::size_t crossing_count() const { return crossings.size(); }

  /// Diagram of a planar-diagram code: crossing (a, b, c, d) has incoming
  /// under edge a, outgoing under edge c and over edges b, d.
  static KnotDiagram from_pd(const std::vector<std::array<int, 4>>& pd) {
    int max_label = 0;
    for (const auto& x : pd)
      for (int e : x) max_label = std::max(max_label, e);
    std::vector<int> parent(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int e) {
      while (parent[static_cast<std::size_t>(e)] != e) e = parent[static_cast<std::size_t>(e)];
      return e;
    };
    for (const auto& x : pd) parent[static_cast<std::size_t>(find(x[1]))] = find(x[3]);
    std::vector<int> id(parent.size(), -1);
    KnotDiagram d;
    auto arc = [&](int e) {
      int& slot = id[static_cast<std::size_t>(find(e))];
      if (slot < 0) slot = d.arcs++;
      return slot;
    };
    for (const auto& x : pd) d.crossings.push_back(Crossing{arc(x[1]), arc(x[0]), arc(x[2]), 0});
    return d;
  }
};

namespace detail {

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

struct UnderEvent {
  int segment;
  double param;
  int crossing;
  bool operator<(const UnderEvent& o) const { return segment != o.segment ? segment < o.segment : param < o.param; }
};

}  // namespace detail

/// Diagram of p seen along `direction`, or nothing when the projection is
/// not generic to within kProjectionTol (parallel overlaps, crossings at or
/// near vertices, triple points, near-intersections in space).
inline std::optional<KnotDiagram> project_along(const Polygon& p, const Vec3& direction) {
  if (!p.closed()) throw std::invalid_argument("project_along: polygon must be closed");
  const Vec3 dz = direction.normalized();
  const Vec3 helper = std::abs(dz.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 ex = dz.cross(helper).normalized();
  const Vec3 ey = dz.cross(ex);
  const int n = static_cast<int>(p.size());
  std::vector<Eigen::Vector2d> q(static_cast<std::size_t>(n));
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec3& v = p[static_cast<std::size_t>(i)];
    q[static_cast<std::size_t>(i)] = {v.dot(ex), v.dot(ey)};
    h[static_cast<std::size_t>(i)] = v.dot(dz);
  }
  auto start = [&](int i) { return q[static_cast<std::size_t>(i)]; };
  auto dir = [&](int i) { return Eigen::Vector2d(q[static_cast<std::size_t>((i + 1) % n)] - q[static_cast<std::size_t>(i)]); };
  auto height = [&](int i, double s) {
    return (1.0 - s) * h[static_cast<std::size_t>(i)] + s * h[static_cast<std::size_t>((i + 1) % n)];
  };

  struct Raw {
    int over_seg, under_seg;
    double over_param, under_param;
    int sign;
  };
  std::vector<Raw> raw;
  std::vector<std::vector<double>> params(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d r = dir(i);
    const double lr = r.norm();
    if (lr < kProjectionTol) return std::nullopt;  // edge seen end-on
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector2d s = dir(j);
      const double ls = s.norm();
      const double denom = detail::cross2(r, s);
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        if (std::abs(denom) < kProjectionTol * lr * ls && r.dot(s) * (j == i + 1 ? 1.0 : -1.0) < 0.0) {
          return std::nullopt;  // image folds back on itself
        }
        continue;
      }
      const Eigen::Vector2d w = start(j) - start(i);
      if (std::abs(denom) < kProjectionTol * lr * ls) {
        // Parallel images: degenerate only if they overlap.
        if (std::abs(detail::cross2(r, w)) / lr < kProjectionTol) {
          const double a0 = w.dot(r) / (lr * lr);
          const double a1 = (w + s).dot(r) / (lr * lr);
          if (std::max(a0, a1) > -kProjectionTol && std::min(a0, a1) < 1.0 + kProjectionTol) return std::nullopt;
        }
        continue;
      }
      const double si = detail::cross2(w, s) / denom;
      const double tj = detail::cross2(w, r) / denom;
      const double tol_i = kProjectionTol / lr;
      const double tol_j = kProjectionTol / ls;
      if (si < -tol_i || si > 1.0 + tol_i || tj < -tol_j || tj > 1.0 + tol_j) continue;
      if (si < tol_i || si > 1.0 - tol_i || tj < tol_j || tj > 1.0 - tol_j) return std::nullopt;
      const double hi = height(i, si);
      const double hj = height(j, tj);
      if (std::abs(hi - hj) < kProjectionTol) return std::nullopt;
      const bool i_over = hi > hj;
      const Eigen::Vector2d over_dir = i_over ? r : s;
      const Eigen::Vector2d under_dir = i_over ? s : r;
      const int sign = detail::cross2(under_dir, over_dir) > 0.0 ? 1 : -1;
      raw.push_back(i_over ? Raw{i, j, si, tj, sign} : Raw{j, i, tj, si, sign});
      params[static_cast<std::size_t>(i)].push_back(si * lr);
      params[static_cast<std::size_t>(j)].push_back(tj * ls);
    }
  }
  for (auto& ps : params) {
    std::sort(ps.begin(), ps.end());
    for (std::size_t k = 1; k < ps.size(); ++k)
      if (ps[k] - ps[k - 1] < kProjectionTol) return std::nullopt;  // triple point
  }

  KnotDiagram d;
  const int k = static_cast<int>(raw.size());
  d.arcs = k;
  if (k == 0) return d;
  std::vector<detail::UnderEvent> events;
  for (int c = 0; c < k; ++c) events.push_back({raw[static_cast<std::size_t>(c)].under_seg, raw[static_cast<std::size_t>(c)].under_param, c});
  std::sort(events.begin(), events.end());
  // Arc e starts at under-event e and runs to event e+1 (cyclically).
  auto arc_at = [&](int seg, double param) {
    const detail::UnderEvent key{seg, param, -1};
    const int before = static_cast<int>(std::lower_bound(events.begin(), events.end(), key) - events.begin());
    return (before - 1 + k) % k;
  };
  d.crossings.resize(static_cast<std::size_t>(k));
  for (int e = 0; e < k; ++e) {
    const auto& rc = raw[static_cast<std::size_t>(events[static_cast<std::size_t>(e)].crossing)];
    d.crossings[static_cast<std::size_t>(e)] = Crossing{arc_at(rc.over_seg, rc.over_param), (e - 1 + k) % k, e, rc.sign};
  }
  return d;
}

/// Diagram along a random direction, retrying non-generic directions.
template <class URBG>
KnotDiagram generic_projection(const Polygon& p, URBG& rng) {
  for (int attempt = 0; attempt <= kMaxProjectionRetries; ++attempt) {
    const Eigen::VectorXd v = random_direction(rng, 3);
    if (auto d = project_along(p, Vec3(v[0], v[1], v[2]))) return *d;
  }
  throw std::runtime_error("generic_projection: no generic direction found in " +
                           std::to_string(kMaxProjectionRetries) + " retries; polygon is nearly singular");
}

/// Absolute determinant of an integer matrix by fraction-free elimination.
inline mpz_class bareiss_abs_determinant(std::vector<std::vector<mpz_class>> a) {
  const std::size_t m = a.size();
  if (m == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < m && a[r][k] == 0) ++r;
      if (r == m) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      for (std::size_t j = k + 1; j < m; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  mpz_class det = a[m - 1][m - 1];
  if (sign < 0) det = -det;
  return abs(det);
}

/// |Delta(-1)|: absolute value of a first minor of the coloring matrix
/// (over arc +2, both under arcs -1 in each crossing's row).
inline mpz_class knot_determinant(const KnotDiagram& d) {
  const std::size_t k = d.crossings.size();
  if (k == 0) return 1;
  if (static_cast<std::size_t>(d.arcs) != k) throw std::invalid_argument("knot_determinant: need one arc per crossing");
  std::vector<std::vector<mpz_class>> a(k, std::vector<mpz_class>(k, 0));
  for (std::size_t c = 0; c < k; ++c) {
    const auto& x = d.crossings[c];
    a[c][static_cast<std::size_t>(x.over)] += 2;
    a[c][static_cast<std::size_t>(x.under_in)] -= 1;
    a[c][static_cast<std::size_t>(x.under_out)] -= 1;
  }
  a.pop_back();
  for (auto& row : a) row.pop_back();
  return bareiss_abs_determinant(std::move(a));
}

template <class URBG>
mpz_class knot_determinant(const Polygon& p, URBG& rng) {
  return knot_determinant(generic_projection(p, rng));
}

/// Equilateral hexagons can only form trefoils, so any determinant other
/// than 1 means knotted.
template <class URBG>
bool is_knotted_hexagon(const Polygon& p, URBG& rng) {
  if (!p.closed() || p.size() != 6) throw std::invalid_argument("is_knotted_hexagon: need a closed hexagon");
  return knot_determinant(p, rng) != 1;
}

/// Observable "knot": 1 when the knot determinant differs from 1. The
/// projection directions come from their own stream seeded with `seed`.
inline Observable make_knot_observable(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(make_rng(seed, 0x6b6e6f74ULL));
  return {"knot", [rng](const Polygon& p, const ActionAngle&) { return knot_determinant(p, *rng) != 1 ? 1.0 : 0.0; }};
}

}  // namespace polysample
