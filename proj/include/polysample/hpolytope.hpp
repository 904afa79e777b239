#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace polysample {

inline constexpr double kContainsTol = 1e-9;
inline constexpr double kParallelTol = 1e-13;

/// Polytope { x : A x <= b } with a bounding box lo <= x <= hi that every
/// builder knows in closed form. The box is used by the rejection oracles;
/// it is not part of the inequality system.
class HPolytope {
 public:
  HPolytope() = default;
  explicit HPolytope(int dim)
      : A_(0, dim), b_(0), lo_(Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity())),
        hi_(Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity())) {}

  int dim() const { return static_cast<int>(A_.cols()); }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& box_lo() const { return lo_; }
  const Eigen::VectorXd& box_hi() const { return hi_; }

  void add_row(const Eigen::VectorXd& a, double rhs) {
    if (a.size() != dim()) throw std::invalid_argument("HPolytope::add_row: dimension mismatch");
    A_.conservativeResize(A_.rows() + 1, Eigen::NoChange);
    b_.conservativeResize(b_.size() + 1);
    A_.row(A_.rows() - 1) = a.transpose();
    b_[b_.size() - 1] = rhs;
  }

  void set_box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != dim() || hi.size() != dim()) {
      throw std::invalid_argument("HPolytope::set_box: dimension mismatch");
    }
    lo_ = std::move(lo);
    hi_ = std::move(hi);
  }

  bool has_finite_box() const { return lo_.allFinite() && hi_.allFinite(); }

  double box_volume() const {
    if (!has_finite_box()) throw std::logic_error("HPolytope: no finite bounding box");
    return (hi_ - lo_).prod();
  }

  /// True iff a.x <= b + tol for every row.
  bool contains(const Eigen::VectorXd& x, double tol = kContainsTol) const {
    if (x.size() != dim()) throw std::invalid_argument("HPolytope::contains: dimension mismatch");
    return ((A_ * x - b_).array() <= tol).all();
  }

  /// Smallest slack b - A x over all rows.
  double min_slack(const Eigen::VectorXd& x) const {
    if (rows() == 0) return std::numeric_limits<double>::infinity();
    return (b_ - A_ * x).minCoeff();
  }

  bool strictly_contains(const Eigen::VectorXd& x) const { return min_slack(x) > 0.0; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

/// Interval of t with x + t v inside P, by the ratio test over the rows.
/// Rows nearly parallel to v are skipped when x satisfies them and make
/// the interval empty otherwise.
inline std::pair<double, double> chord_intersection(const HPolytope& P, const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& v) {
  if (x.size() != P.dim() || v.size() != P.dim()) {
    throw std::invalid_argument("chord_intersection: dimension mismatch");
  }
  if (!(v.norm() > 0.0)) throw std::invalid_argument("chord_intersection: zero direction");
  if (!P.contains(x)) throw std::domain_error("chord_intersection: start point outside polytope");

  const Eigen::VectorXd slack = P.b() - P.A() * x;
  const Eigen::VectorXd rate = P.A() * v;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.rows(); ++i) {
    if (std::abs(rate[i]) < kParallelTol) {
      if (slack[i] < -kContainsTol) {
        throw std::runtime_error("chord_intersection: empty interval");
      }
      continue;
    }
    const double t = slack[i] / rate[i];
    if (rate[i] > 0.0) {
      t1 = std::min(t1, t);
    } else {
      t0 = std::max(t0, t);
    }
  }
  if (!(t0 < t1) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw std::runtime_error("chord_intersection: empty or unbounded interval (t0=" +
                             std::to_string(t0) + ", t1=" + std::to_string(t1) + ")");
  }
  return {t0, t1};
}

}  // namespace polysample
