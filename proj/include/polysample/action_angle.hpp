#pragma once

// Action-angle charts: closed polygons from (diagonal lengths, dihedral
// angles) over a triangulation, the inverse map, and open arms from
// (z-heights, azimuths).
//
// Dihedral convention: theta_i is the rotation about chord i, oriented from
// its lower- to its higher-labelled endpoint, that carries the child
// triangle (the one further from the root in the dual tree) from its
// unfolded coplanar position to its actual one. theta = pi is the unfolded
// position, so planar convex polygons have every theta equal to pi.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polysample/geometry.hpp"
#include "polysample/triangulation.hpp"

namespace polysample {

/// Triangles with area below this are rejected by the chart.
inline constexpr double kDegenerateArea = 1e-12;

struct ActionAngle {
  Eigen::VectorXd d;      ///< diagonal lengths in the triangulation's chord order
  Eigen::VectorXd theta;  ///< dihedral angles in [0, 2 pi)
};

struct ArmCoordinates {
  Eigen::VectorXd z;      ///< edge heights, |z_i| <= r_i
  Eigen::VectorXd theta;  ///< edge azimuths
};

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

/// Open arm from the origin with edge i equal to
/// (cos theta_i sqrt(r_i^2 - z_i^2), sin theta_i sqrt(r_i^2 - z_i^2), z_i).
inline Polygon build_arm(const ArmCoordinates& c, const EdgeLengths& r) {
  const int n = r.size();
  if (c.z.size() != n || c.theta.size() != n) {
    throw std::invalid_argument("build_arm: coordinate and edge-length counts differ");
  }
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(n) + 1);
  v.push_back(Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    const double zi = c.z[i];
    if (!(std::abs(zi) <= ri)) {
      throw std::domain_error("build_arm: |z_" + std::to_string(i + 1) + "| exceeds r_" + std::to_string(i + 1));
    }
    const double rho = std::sqrt(std::max(0.0, (ri - zi) * (ri + zi)));
    v.push_back(v.back() + Vec3(rho * std::cos(c.theta[i]), rho * std::sin(c.theta[i]), zi));
  }
  return Polygon(std::move(v), false);
}

namespace detail {

/// Length of the side joining u and v under (r, d).
inline double side_length(const Triangulation& t, const EdgeLengths& r, const Eigen::VectorXd& d, int u, int v) {
  const Side s = t.side(u, v);
  return s.kind == Side::Kind::Edge ? r.r(s.index) : d[s.index];
}

/// Unit vector along the component of x orthogonal to the unit vector u;
/// throws when that component is too short to define a half-plane.
inline Vec3 orthogonal_unit(const Vec3& x, const Vec3& u, double base, const char* where) {
  const Vec3 perp = x - x.dot(u) * u;
  const double h = perp.norm();
  if (0.5 * base * h < kDegenerateArea) throw DegenerateGeometry(std::string(where) + ": degenerate triangle");
  return perp / h;
}

inline void check_triangle(double a, double b, double c, const char* where) {
  // Heron with the stable ordering a >= b >= c.
  double s[3] = {a, b, c};
  std::sort(s, s + 3, std::greater<>());
  const double q = (s[0] + (s[1] + s[2])) * (s[2] - (s[0] - s[1])) * (s[2] + (s[0] - s[1])) * (s[0] + (s[1] - s[2]));
  if (!(q > 0.0) || 0.25 * std::sqrt(q) < kDegenerateArea) {
    throw DegenerateGeometry(std::string(where) + ": side lengths do not span a triangle");
  }
}

}  // namespace detail

/// Closed polygon with the given diagonals and dihedrals. Frame: v_1 at the
/// origin, v_2 on the +x axis, apex of the root triangle in the upper half of
/// the xy-plane. Throws DegenerateGeometry when d is not strictly inside the
/// triangulation polytope.
inline Polygon build_polygon(const Triangulation& t, const EdgeLengths& r, const ActionAngle& aa) {
  const int n = t.n();
  if (r.size() != n) throw std::invalid_argument("build_polygon: need n edge lengths");
  if (aa.d.size() != t.diagonal_count() || aa.theta.size() != t.diagonal_count()) {
    throw std::invalid_argument("build_polygon: need n-3 diagonals and angles");
  }
  std::vector<Vec3> v(static_cast<std::size_t>(n) + 1);  // 1-indexed
  auto pos = [&](int i) -> Vec3& { return v[static_cast<std::size_t>(i)]; };

  const auto& tris = t.triangles();
  const auto& root = tris[static_cast<std::size_t>(t.dual_tree().root)];
  const int c = root[2];
  const double r12 = r.r(1);
  const double l1c = detail::side_length(t, r, aa.d, 1, c);
  const double l2c = detail::side_length(t, r, aa.d, 2, c);
  detail::check_triangle(r12, l1c, l2c, "build_polygon");
  const double x = (l1c * l1c - l2c * l2c + r12 * r12) / (2.0 * r12);
  pos(1) = Vec3::Zero();
  pos(2) = Vec3(r12, 0.0, 0.0);
  pos(c) = Vec3(x, std::sqrt(std::max(0.0, (l1c - x) * (l1c + x))), 0.0);

  for (const auto& link : t.dual_tree().links) {
    const Chord& ch = t.chords()[static_cast<std::size_t>(link.diagonal)];
    const Vec3 A = pos(ch.a);
    const Vec3 B = pos(ch.b);
    const double D = aa.d[link.diagonal];
    const double lac = detail::side_length(t, r, aa.d, ch.a, link.child_apex);
    const double lbc = detail::side_length(t, r, aa.d, ch.b, link.child_apex);
    detail::check_triangle(D, lac, lbc, "build_polygon");
    const Vec3 u = (B - A).normalized();
    const Vec3 w = -detail::orthogonal_unit(pos(link.parent_apex) - A, u, D, "build_polygon");
    const double along = (lac * lac - lbc * lbc + D * D) / (2.0 * D);
    const double h = std::sqrt(std::max(0.0, (lac - along) * (lac + along)));
    const double phi = aa.theta[link.diagonal] - std::numbers::pi;
    pos(link.child_apex) = A + along * u + h * (std::cos(phi) * w + std::sin(phi) * u.cross(w));
  }
  v.erase(v.begin());
  return Polygon(std::move(v), true);
}

/// Inverse of build_polygon: diagonal lengths and dihedrals of p. Invariant
/// under orientation-preserving rigid motions of p.
inline ActionAngle recover_coordinates(const Triangulation& t, const Polygon& p) {
  if (!p.closed() || static_cast<int>(p.size()) != t.n()) {
    throw std::invalid_argument("recover_coordinates: need a closed polygon with n vertices");
  }
  auto pos = [&](int i) -> const Vec3& { return p[static_cast<std::size_t>(i - 1)]; };
  ActionAngle aa;
  aa.d.resize(t.diagonal_count());
  aa.theta.resize(t.diagonal_count());
  for (int k = 0; k < t.diagonal_count(); ++k) {
    const Chord& ch = t.chords()[static_cast<std::size_t>(k)];
    aa.d[k] = (pos(ch.b) - pos(ch.a)).norm();
  }
  for (const auto& link : t.dual_tree().links) {
    const Chord& ch = t.chords()[static_cast<std::size_t>(link.diagonal)];
    const Vec3& A = pos(ch.a);
    const double D = aa.d[link.diagonal];
    if (D < kDegenerateEdge) throw DegenerateGeometry("recover_coordinates: zero-length diagonal");
    const Vec3 u = (pos(ch.b) - A) / D;
    const Vec3 w = -detail::orthogonal_unit(pos(link.parent_apex) - A, u, D, "recover_coordinates");
    const Vec3 wc = detail::orthogonal_unit(pos(link.child_apex) - A, u, D, "recover_coordinates");
    const double phi = std::atan2(u.dot(w.cross(wc)), w.dot(wc));
    aa.theta[link.diagonal] = wrap_angle(phi + std::numbers::pi);
  }
  return aa;
}

/// Polygon whose i-th edge vector is edge sigma[i] of p, started at the
/// origin. sigma is a 0-indexed permutation of the edges.
inline Polygon permute_edges(const Polygon& p, const std::vector<int>& sigma) {
  if (!p.closed()) throw std::invalid_argument("permute_edges: polygon must be closed");
  const auto edges = edge_vectors(p);
  const std::size_t n = edges.size();
  if (sigma.size() != n) throw std::invalid_argument("permute_edges: permutation has the wrong size");
  std::vector<bool> seen(n, false);
  for (int s : sigma) {
    if (s < 0 || static_cast<std::size_t>(s) >= n || seen[static_cast<std::size_t>(s)]) {
      throw std::invalid_argument("permute_edges: not a permutation");
    }
    seen[static_cast<std::size_t>(s)] = true;
  }
  std::vector<Vec3> v(n);
  v[0] = Vec3::Zero();
  for (std::size_t i = 1; i < n; ++i) v[i] = v[i - 1] + edges[static_cast<std::size_t>(sigma[i - 1])];
  return Polygon(std::move(v), true);
}

/// All three hexagon dihedrals in (0, pi).
inline bool dihedral_octant_indicator(const ActionAngle& aa) {
  if (aa.theta.size() != 3) throw std::invalid_argument("dihedral_octant_indicator: needs a hexagon (3 dihedrals)");
  for (int i = 0; i < 3; ++i)
    if (!(aa.theta[i] > 0.0 && aa.theta[i] < std::numbers::pi)) return false;
  return true;
}

/// Rigid motion taking v_i to the origin, v_j onto the +x axis and v_k into
/// the upper half of the xy-plane (1-indexed labels).
inline Polygon to_frame(const Polygon& p, int i, int j, int k) {
  auto at = [&](int a) -> const Vec3& { return p[static_cast<std::size_t>(a - 1)]; };
  const Vec3 o = at(i);
  const Vec3 ex = (at(j) - o).normalized();
  const Vec3 ey = detail::orthogonal_unit(at(k) - o, ex, (at(j) - o).norm(), "to_frame");
  const Vec3 ez = ex.cross(ey);
  std::vector<Vec3> v;
  v.reserve(p.size());
  for (const auto& x : p.vertices()) {
    const Vec3 y = x - o;
    v.emplace_back(y.dot(ex), y.dot(ey), y.dot(ez));
  }
  return Polygon(std::move(v), p.closed());
}

/// p moved into build_polygon's frame for triangulation t.
inline Polygon to_canonical_frame(const Triangulation& t, const Polygon& p) {
  const auto& root = t.triangles()[static_cast<std::size_t>(t.dual_tree().root)];
  return to_frame(p, 1, 2, root[2]);
}

}  // namespace polysample
