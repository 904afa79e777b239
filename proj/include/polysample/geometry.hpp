#pragma once

// Polygons in 3-space and the observables integrated over them.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polysample {

using Vec3 = Eigen::Vector3d;

/// Raised when a construction hits a zero-length edge, a flat triangle or a
/// point on a polytope boundary. Samplers catch this to reject a move.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDegenerateEdge = 1e-14;

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Ordered vertices of an open or closed polygonal walk.
///
/// A closed polygon with vertices v_1..v_n has the n edges v_{i+1} - v_i
/// taken cyclically; an open one has n - 1 edges.
class Polygon {
 public:
  Polygon(std::vector<Vec3> vertices, bool closed)
      : vertices_(std::move(vertices)), closed_(closed) {
    if (vertices_.size() < 3) {
      throw std::invalid_argument("Polygon: need at least 3 vertices");
    }
    for (const auto& v : vertices_) {
      if (!is_finite(v)) {
        throw std::invalid_argument("Polygon: non-finite vertex coordinate");
      }
    }
  }

  std::size_t size() const { return vertices_.size(); }
  bool closed() const { return closed_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& operator[](std::size_t i) const { return vertices_[i]; }

  std::size_t edge_count() const { return closed_ ? size() : size() - 1; }

 private:
  std::vector<Vec3> vertices_;
  bool closed_;
};

/// Positive edge lengths r_1..r_n.
class EdgeLengths {
 public:
  EdgeLengths() = default;
  explicit EdgeLengths(std::vector<double> r) : r_(std::move(r)) {
    if (r_.empty()) throw std::invalid_argument("EdgeLengths: empty");
    for (double x : r_) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("EdgeLengths: lengths must be positive and finite");
      }
    }
  }

  static EdgeLengths equilateral(int n, double length = 1.0) {
    if (n < 1) throw std::invalid_argument("EdgeLengths: n must be positive");
    return EdgeLengths(std::vector<double>(static_cast<std::size_t>(n), length));
  }

  int size() const { return static_cast<int>(r_.size()); }
  /// 1-indexed access: r(1) is the length of edge v_1 -> v_2.
  double r(int i) const { return r_.at(static_cast<std::size_t>(i - 1)); }
  double operator[](std::size_t i) const { return r_[i]; }
  const std::vector<double>& values() const { return r_; }

  double total() const { return std::accumulate(r_.begin(), r_.end(), 0.0); }

  bool is_equilateral() const {
    return std::all_of(r_.begin(), r_.end(), [&](double x) { return x == r_.front(); });
  }

  /// No edge longer than the sum of the others (strictly, so that closed
  /// polygons with these lengths are not all collinear).
  bool closable() const {
    const double longest = *std::max_element(r_.begin(), r_.end());
    return longest < total() - longest;
  }

  bool operator==(const EdgeLengths&) const = default;

 private:
  std::vector<double> r_;
};

inline std::vector<Vec3> edge_vectors(const Polygon& p) {
  const std::size_t n = p.size();
  std::vector<Vec3> edges;
  edges.reserve(p.edge_count());
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back(p[i + 1] - p[i]);
  if (p.closed()) edges.push_back(p[0] - p[n - 1]);
  return edges;
}

/// Angle between two nonzero vectors; the cosine is clamped so that
/// collinear edges give 0 or pi rather than NaN.
inline double turning_angle(const Vec3& a, const Vec3& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDegenerateEdge || nb < kDegenerateEdge) {
    throw DegenerateGeometry("turning_angle: zero-length edge");
  }
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

/// Sum of the turning angles over all n cyclic pairs of consecutive edges.
inline double total_curvature(const Polygon& p) {
  if (!p.closed()) throw std::invalid_argument("total_curvature: polygon must be closed");
  const auto edges = edge_vectors(p);
  double kappa = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    kappa += turning_angle(edges[i], edges[(i + 1) % edges.size()]);
  }
  return kappa;
}

/// |v_1 - v_{k+1}|, the chord skipping the first k edges.
inline double chord_length(const Polygon& p, int k) {
  if (!p.closed()) throw std::invalid_argument("chord_length: polygon must be closed");
  const int n = static_cast<int>(p.size());
  if (k < 2 || k > n - 2) {
    throw std::out_of_range("chord_length: k must satisfy 2 <= k <= n-2");
  }
  return (p[static_cast<std::size_t>(k)] - p[0]).norm();
}

inline double z_width(const Polygon& p) {
  auto [lo, hi] = std::minmax_element(p.vertices().begin(), p.vertices().end(),
                                      [](const Vec3& a, const Vec3& b) { return a.z() < b.z(); });
  return hi->z() - lo->z();
}

/// Length of the failure-to-close vector, the sum of the given edges.
inline double closure_defect(std::span<const Vec3> edges) {
  Vec3 sum = Vec3::Zero();
  for (const auto& e : edges) sum += e;
  return sum.norm();
}

/// Closure defect of the polygon read as an open chain of its edges; for a
/// closed polygon this includes the wrap-around edge and is zero up to
/// rounding.
inline double closure_defect(const Polygon& p) {
  const auto edges = edge_vectors(p);
  return closure_defect(std::span<const Vec3>(edges));
}

/// Largest distance from v_1 to any vertex.
inline double max_distance_from_first(const Polygon& p) {
  double m = 0.0;
  for (const auto& v : p.vertices()) m = std::max(m, (v - p[0]).norm());
  return m;
}

inline Polygon reversed(const Polygon& p) {
  const std::size_t n = p.size();
  std::vector<Vec3> v(n);
  v[0] = p[0];
  for (std::size_t j = 1; j < n; ++j) v[j] = p[n - j];
  return Polygon(std::move(v), p.closed());
}

// Text format: one vertex "x y z" per line, polygons separated by blank
// lines, '#' starts a comment. Open/closed is decided by the caller.

inline std::vector<std::vector<Vec3>> read_vertex_blocks(std::istream& in) {
  std::vector<std::vector<Vec3>> blocks;
  std::vector<Vec3> current;
  std::string line;
  int line_no = 0;
  auto flush = [&] {
    if (!current.empty()) blocks.push_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const bool had_comment = hash != std::string::npos;
    if (had_comment) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      // Comment-only lines do not separate polygons; blank ones do.
      if (!had_comment) flush();
      continue;
    }
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) {
      throw std::runtime_error("read_vertex_blocks: malformed vertex on line " +
                               std::to_string(line_no));
    }
    std::string rest;
    if (ls >> rest) {
      throw std::runtime_error("read_vertex_blocks: trailing data on line " +
                               std::to_string(line_no));
    }
    current.emplace_back(x, y, z);
  }
  flush();
  return blocks;
}

inline std::vector<Polygon> read_polygons(std::istream& in, bool closed) {
  std::vector<Polygon> out;
  for (auto& block : read_vertex_blocks(in)) out.emplace_back(std::move(block), closed);
  return out;
}

inline void write_polygon(std::ostream& out, const Polygon& p) {
  const auto old_precision = out.precision(17);
  for (const auto& v : p.vertices()) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  out.precision(old_precision);
}

inline void write_polygons(std::ostream& out, std::span<const Polygon> polygons) {
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    if (i > 0) out << '\n';
    write_polygon(out, polygons[i]);
  }
}

}  // namespace polysample
