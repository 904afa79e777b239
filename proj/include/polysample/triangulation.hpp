#pragma once

// Triangulations of the abstract n-gon and their dual trees.
//
// Vertices are 1-indexed. Chord i of a triangulation is "diagonal i": the
// order in which chords are stored is the coordinate order of the action
// variables, so two triangulations with the same chord set but a different
// order are different charts.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polysample/random.hpp"

namespace polysample {

struct Chord {
  int a = 0;  ///< lower endpoint
  int b = 0;  ///< higher endpoint

  friend auto operator<=>(const Chord&, const Chord&) = default;
};

inline Chord make_chord(int u, int v) { return u < v ? Chord{u, v} : Chord{v, u}; }

/// One polygon-edge or diagonal side of a triangle.
struct Side {
  enum class Kind { Edge, Diagonal } kind;
  int index;  ///< 1-indexed edge number (edge i joins v_i and v_{i+1}), or 0-indexed diagonal
};

/// Link between a triangle and its parent in the dual tree.
struct TreeLink {
  int parent = -1;       ///< parent triangle index
  int child = -1;        ///< child triangle index
  int diagonal = -1;     ///< shared chord (0-indexed diagonal)
  int parent_apex = 0;   ///< vertex of the parent opposite the chord
  int child_apex = 0;    ///< vertex of the child opposite the chord
};

struct DualTree {
  int root = 0;                        ///< triangle containing the edge (1,2)
  std::vector<int> parent;             ///< parent triangle, -1 at the root
  std::vector<std::vector<int>> children;
  std::vector<TreeLink> links;         ///< breadth-first from the root
};

class Triangulation {
 public:
  using Triangle = std::array<int, 3>;  // sorted vertex labels

  /// Validates the chord list and derives triangles and the dual tree.
  static Triangulation from_chords(int n, std::vector<Chord> chords) {
    Triangulation t;
    t.n_ = n;
    t.chords_ = std::move(chords);
    t.validate();
    t.derive();
    return t;
  }

  int n() const { return n_; }
  int diagonal_count() const { return static_cast<int>(chords_.size()); }
  const std::vector<Chord>& chords() const { return chords_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const DualTree& dual_tree() const { return tree_; }

  /// Chords sorted lexicographically, for order-insensitive comparison.
  std::vector<Chord> canonical_chords() const {
    auto c = chords_;
    std::sort(c.begin(), c.end());
    return c;
  }

  bool same_chords(const Triangulation& other) const {
    return n_ == other.n_ && canonical_chords() == other.canonical_chords();
  }

  /// Label of the segment joining vertices u and v (an edge or a diagonal).
  Side side(int u, int v) const {
    if (u > v) std::swap(u, v);
    if (v == u + 1) return {Side::Kind::Edge, u};
    if (u == 1 && v == n_) return {Side::Kind::Edge, n_};
    const int d = chord_index_[static_cast<std::size_t>((u - 1) * n_ + (v - 1))];
    if (d < 0) {
      throw std::invalid_argument("Triangulation::side: (" + std::to_string(u) + "," +
                                  std::to_string(v) + ") is neither an edge nor a diagonal");
    }
    return {Side::Kind::Diagonal, d};
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < chords_.size(); ++i) {
      if (i) os << ',';
      os << '(' << chords_[i].a << ',' << chords_[i].b << ')';
    }
    os << '}';
    return os.str();
  }

 private:
  void validate() {
    if (n_ < 3) throw std::invalid_argument("Triangulation: n must be at least 3");
    if (static_cast<int>(chords_.size()) != n_ - 3) {
      throw std::invalid_argument("Triangulation: need exactly n-3 chords, got " +
                                  std::to_string(chords_.size()));
    }
    std::set<Chord> seen;
    for (auto& c : chords_) {
      c = make_chord(c.a, c.b);
      if (c.a < 1 || c.b > n_) throw std::invalid_argument("Triangulation: vertex out of range");
      if (c.b - c.a < 2 || (c.a == 1 && c.b == n_)) {
        throw std::invalid_argument("Triangulation: chord is a polygon edge");
      }
      if (!seen.insert(c).second) throw std::invalid_argument("Triangulation: repeated chord");
    }
    for (const auto& p : chords_) {
      for (const auto& q : chords_) {
        if (p.a < q.a && q.a < p.b && p.b < q.b) {
          throw std::invalid_argument("Triangulation: chords cross");
        }
      }
    }
  }

  void derive() {
    const auto N = static_cast<std::size_t>(n_);
    chord_index_.assign(N * N, -1);
    std::vector<std::vector<bool>> adj(N + 1, std::vector<bool>(N + 1, false));
    auto connect = [&](int u, int v) { adj[u][v] = adj[v][u] = true; };
    for (int i = 1; i <= n_; ++i) connect(i, i % n_ + 1);
    for (std::size_t k = 0; k < chords_.size(); ++k) {
      const auto& c = chords_[k];
      connect(c.a, c.b);
      chord_index_[static_cast<std::size_t>((c.a - 1) * n_ + (c.b - 1))] = static_cast<int>(k);
    }
    // In a triangulated convex polygon every 3-cycle of the graph is a face.
    triangles_.clear();
    for (int a = 1; a <= n_; ++a)
      for (int b = a + 1; b <= n_; ++b)
        if (adj[a][b])
          for (int c = b + 1; c <= n_; ++c)
            if (adj[a][c] && adj[b][c]) triangles_.push_back({a, b, c});
    if (static_cast<int>(triangles_.size()) != n_ - 2) {
      throw std::logic_error("Triangulation: expected n-2 triangles");
    }

    // Triangles on either side of each chord.
    std::vector<std::vector<int>> sides(chords_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      for (int e = 0; e < 3; ++e) {
        const int u = tri[static_cast<std::size_t>(e)];
        const int v = tri[static_cast<std::size_t>((e + 1) % 3)];
        const auto s = side(u, v);
        if (s.kind == Side::Kind::Diagonal) sides[static_cast<std::size_t>(s.index)].push_back(static_cast<int>(t));
      }
    }

    tree_ = DualTree{};
    tree_.parent.assign(triangles_.size(), -1);
    tree_.children.assign(triangles_.size(), {});
    tree_.root = -1;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      if (triangles_[t][0] == 1 && triangles_[t][1] == 2) tree_.root = static_cast<int>(t);
    }
    if (tree_.root < 0) throw std::logic_error("Triangulation: no triangle contains edge (1,2)");

    std::vector<bool> visited(triangles_.size(), false);
    std::queue<int> queue;
    queue.push(tree_.root);
    visited[static_cast<std::size_t>(tree_.root)] = true;
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop();
      const auto& tri = triangles_[static_cast<std::size_t>(t)];
      for (int e = 0; e < 3; ++e) {
        const int u = tri[static_cast<std::size_t>(e)];
        const int v = tri[static_cast<std::size_t>((e + 1) % 3)];
        const auto s = side(u, v);
        if (s.kind != Side::Kind::Diagonal) continue;
        const auto& pair = sides[static_cast<std::size_t>(s.index)];
        const int other = pair[0] == t ? pair[1] : pair[0];
        if (visited[static_cast<std::size_t>(other)]) continue;
        visited[static_cast<std::size_t>(other)] = true;
        tree_.parent[static_cast<std::size_t>(other)] = t;
        tree_.children[static_cast<std::size_t>(t)].push_back(other);
        tree_.links.push_back(TreeLink{t, other, s.index, apex(tri, u, v),
                                       apex(triangles_[static_cast<std::size_t>(other)], u, v)});
        queue.push(other);
      }
    }
    if (static_cast<int>(tree_.links.size()) != n_ - 3) {
      throw std::logic_error("Triangulation: dual tree is not connected");
    }
  }

  static int apex(const Triangle& tri, int u, int v) {
    for (int x : tri)
      if (x != u && x != v) return x;
    throw std::logic_error("Triangulation: degenerate triangle");
  }

  int n_ = 0;
  std::vector<Chord> chords_;
  std::vector<Triangle> triangles_;
  std::vector<int> chord_index_;
  DualTree tree_;
};

/// Chords (1,3), (1,4), ..., (1,n-1); diagonal i joins v_1 and v_{i+2}.
inline Triangulation fan_triangulation(int n) {
  if (n < 3) throw std::invalid_argument("fan_triangulation: n must be at least 3");
  std::vector<Chord> chords;
  for (int k = 3; k <= n - 1; ++k) chords.push_back({1, k});
  return Triangulation::from_chords(n, std::move(chords));
}

/// Walks the surviving cycle repeatedly from v_1, joining every other
/// vertex and dropping the skipped one, until n-3 chords exist.
inline Triangulation spiral_triangulation(int n) {
  if (n < 3) throw std::invalid_argument("spiral_triangulation: n must be at least 3");
  std::vector<int> cycle(static_cast<std::size_t>(n));
  std::iota(cycle.begin(), cycle.end(), 1);
  std::vector<Chord> chords;
  std::size_t pos = 0;
  while (static_cast<int>(chords.size()) < n - 3) {
    const std::size_t m = cycle.size();
    const std::size_t skip = (pos + 1) % m;
    const std::size_t next = (pos + 2) % m;
    chords.push_back(make_chord(cycle[pos], cycle[next]));
    const int next_vertex = cycle[next];
    cycle.erase(cycle.begin() + static_cast<std::ptrdiff_t>(skip));
    pos = static_cast<std::size_t>(std::find(cycle.begin(), cycle.end(), next_vertex) - cycle.begin());
  }
  return Triangulation::from_chords(n, std::move(chords));
}

/// Zigzag between the two ends of the vertex cycle:
/// (1,3), (3,n), (n,4), (4,n-1), (n-1,5), ...
inline Triangulation teeth_triangulation(int n) {
  if (n < 3) throw std::invalid_argument("teeth_triangulation: n must be at least 3");
  std::vector<int> path{1, 3};
  int low = 4;
  int high = n;
  bool take_high = true;
  while (static_cast<int>(path.size()) < n - 2) {
    if (take_high) {
      path.push_back(high--);
    } else {
      path.push_back(low++);
    }
    take_high = !take_high;
  }
  std::vector<Chord> chords;
  for (std::size_t i = 0; i + 1 < path.size() && static_cast<int>(chords.size()) < n - 3; ++i) {
    chords.push_back(make_chord(path[i], path[i + 1]));
  }
  return Triangulation::from_chords(n, std::move(chords));
}

/// Uniformly random triangulation: the apex over base (i, j) is drawn with
/// probability proportional to the number of triangulations it leaves on
/// either side (products of Catalan numbers).
template <class URBG>
Triangulation random_triangulation(int n, URBG& rng) {
  if (n < 3) throw std::invalid_argument("random_triangulation: n must be at least 3");
  std::vector<double> catalan(static_cast<std::size_t>(n), 1.0);
  for (int m = 1; m < n; ++m) {
    catalan[static_cast<std::size_t>(m)] =
        catalan[static_cast<std::size_t>(m - 1)] * 2.0 * (2.0 * m - 1.0) / (m + 1.0);
  }
  // Polygon with k + 2 vertices has catalan[k] triangulations.
  auto count = [&](int i, int j) { return catalan[static_cast<std::size_t>(j - i - 1)]; };

  std::vector<Chord> chords;
  std::vector<std::pair<int, int>> stack{{1, n}};
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    if (j - i < 2) continue;
    const double total = count(i, j);
    double u = uniform01(rng) * total;
    int apex = j - 1;
    for (int k = i + 1; k < j; ++k) {
      const double w = count(i, k) * count(k, j);
      if (u < w) {
        apex = k;
        break;
      }
      u -= w;
    }
    if (apex - i >= 2) chords.push_back({i, apex});
    if (j - apex >= 2) chords.push_back({apex, j});
    stack.emplace_back(i, apex);
    stack.emplace_back(apex, j);
  }
  return Triangulation::from_chords(n, std::move(chords));
}

enum class TriangulationKind { Fan, Spiral, Teeth, Random };

inline TriangulationKind parse_triangulation_kind(std::string_view name) {
  if (name == "fan") return TriangulationKind::Fan;
  if (name == "spiral") return TriangulationKind::Spiral;
  if (name == "teeth") return TriangulationKind::Teeth;
  if (name == "random") return TriangulationKind::Random;
  throw std::invalid_argument("unknown triangulation '" + std::string(name) +
                              "' (expected fan, spiral, teeth or random)");
}

inline std::string_view to_string(TriangulationKind kind) {
  switch (kind) {
    case TriangulationKind::Fan: return "fan";
    case TriangulationKind::Spiral: return "spiral";
    case TriangulationKind::Teeth: return "teeth";
    case TriangulationKind::Random: return "random";
  }
  return "unknown";
}

inline Triangulation make_triangulation(TriangulationKind kind, int n, std::uint64_t seed = 0) {
  switch (kind) {
    case TriangulationKind::Fan: return fan_triangulation(n);
    case TriangulationKind::Spiral: return spiral_triangulation(n);
    case TriangulationKind::Teeth: return teeth_triangulation(n);
    case TriangulationKind::Random: {
      auto rng = make_rng(seed, 0x7472690000000000ULL);
      return random_triangulation(n, rng);
    }
  }
  throw std::invalid_argument("make_triangulation: unknown kind");
}

}  // namespace polysample
