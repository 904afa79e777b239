#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "polysample/closed_forms.hpp"
#include "polysample/hit_and_run.hpp"
#include "polysample/polytope.hpp"
#include "support/stats.hpp"

using namespace polysample;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool on_boundary(const HPolytope& P, const Eigen::VectorXd& x) {
  return P.contains(x, 1e-9) && P.min_slack(x) < 1e-9;
}

std::set<std::vector<double>> row_set(const HPolytope& P) {
  std::set<std::vector<double>> rows;
  for (int i = 0; i < P.rows(); ++i) {
    std::vector<double> row;
    for (int j = 0; j < P.dim(); ++j) row.push_back(P.A()(i, j));
    row.push_back(P.b()[i]);
    rows.insert(row);
  }
  return rows;
}

}  // namespace

TEST(Hyperbox, VolumesAndRows) {
  const auto cube = hyperbox(EdgeLengths::equilateral(3));
  EXPECT_EQ(cube.rows(), 6);
  EXPECT_DOUBLE_EQ(cube.box_volume(), 8.0);
  const auto seg = hyperbox(EdgeLengths({2.0}));
  EXPECT_TRUE(seg.contains(vec({-2.0})));
  EXPECT_FALSE(seg.contains(vec({2.1})));
  EXPECT_DOUBLE_EQ(hyperbox(EdgeLengths({1.0, 2.0})).box_volume(), 8.0);
  auto rng = make_rng(1);
  const auto est = rejection_volume_estimate(cube, rng, 1000);
  EXPECT_DOUBLE_EQ(est.volume, 8.0);
  EXPECT_DOUBLE_EQ(est.stderr_, 0.0);
}

TEST(FanPolytope, MembershipExamples) {
  const auto P5 = fan_polytope(5);
  EXPECT_EQ(P5.dim(), 2);
  EXPECT_TRUE(P5.strictly_contains(vec({1, 1})));
  EXPECT_FALSE(P5.contains(vec({2, 0})));
  EXPECT_TRUE(on_boundary(P5, vec({2, 2})));
  const auto P6 = fan_polytope(6);
  EXPECT_TRUE(on_boundary(P6, vec({2, 3, 2})));
  EXPECT_THROW(fan_polytope(3), std::invalid_argument);
}

TEST(FanPolytope, FoldedTriangleIsInterior) {
  for (int n = 4; n <= 40; ++n) {
    EXPECT_TRUE(fan_polytope(n).strictly_contains(Eigen::VectorXd::Ones(n - 3))) << n;
  }
}

TEST(ConfinedFanPolytope, Membership) {
  const auto P = confined_fan_polytope(6, EdgeLengths::equilateral(6), 1.5);
  EXPECT_TRUE(P.strictly_contains(vec({1, 1, 1})));
  EXPECT_FALSE(P.contains(vec({2, 3, 2})));
  for (double R : {1.1, 1.5, 3.0}) {
    EXPECT_TRUE(confined_fan_polytope(9, EdgeLengths::equilateral(9), R).strictly_contains(Eigen::VectorXd::Ones(6)));
  }
}

TEST(ConfinedFanPolytope, InfiniteRadiusMatchesFanPolytope) {
  const auto r = EdgeLengths::equilateral(8);
  const auto A = fan_polytope(8, r);
  const auto B = confined_fan_polytope(8, r, std::numeric_limits<double>::infinity());
  auto rng = make_rng(8);
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd x(5);
    for (int j = 0; j < 5; ++j) x[j] = uniform(rng, -0.5, 4.0);
    ASSERT_EQ(A.contains(x), B.contains(x));
  }
}

TEST(TriangulationPolytope, FanRowsMatchFanPolytope) {
  for (int n = 4; n <= 12; ++n) {
    const auto r = EdgeLengths::equilateral(n);
    EXPECT_EQ(row_set(triangulation_polytope(fan_triangulation(n), r)), row_set(fan_polytope(n, r))) << n;
  }
}

TEST(TriangulationPolytope, FanMembershipMatchesForGeneralLengths) {
  const EdgeLengths r({1.0, 2.0, 1.5, 0.7, 1.2, 1.9, 0.8});
  const auto A = triangulation_polytope(fan_triangulation(7), r);
  const auto B = fan_polytope(7, r);
  auto rng = make_rng(9);
  for (int i = 0; i < 20000; ++i) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = uniform(rng, 0.0, 5.0);
    ASSERT_EQ(A.contains(x, 0.0), B.contains(x, 0.0));
  }
}

TEST(TriangulationPolytope, SpiralHexagon) {
  const auto P = triangulation_polytope(spiral_triangulation(6), EdgeLengths::equilateral(6));
  EXPECT_TRUE(P.strictly_contains(vec({1, 1, 1})));
  // Inner triangle (1,3,5) cannot have sides 0.5, 0.5 and 1.5.
  EXPECT_FALSE(P.contains(vec({0.5, 0.5, 1.5})));
  EXPECT_FALSE(P.contains(vec({1.5, 0.5, 0.5})));
}

TEST(TriangulationPolytope, QuadrilateralIsAnInterval) {
  const EdgeLengths r({1.0, 2.0, 1.5, 1.0});
  const auto P = triangulation_polytope(fan_triangulation(4), r);
  const auto [t0, t1] = chord_intersection(P, vec({2.0}), vec({1.0}));
  EXPECT_NEAR(2.0 + t0, std::max(std::abs(1.0 - 2.0), std::abs(1.5 - 1.0)), 1e-15);
  EXPECT_NEAR(2.0 + t1, std::min(1.0 + 2.0, 1.5 + 1.0), 1e-15);
}

TEST(ChordIntersection, Examples) {
  const auto cube = hyperbox(EdgeLengths::equilateral(3));
  auto [a0, a1] = chord_intersection(cube, Eigen::VectorXd::Zero(3), vec({1, 0, 0}));
  EXPECT_DOUBLE_EQ(a0, -1.0);
  EXPECT_DOUBLE_EQ(a1, 1.0);
  auto [b0, b1] = chord_intersection(cube, Eigen::VectorXd::Zero(3), vec({1, 1, 1}) / std::sqrt(3.0));
  EXPECT_NEAR(b0, -std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(b1, std::sqrt(3.0), 1e-15);
  auto [c0, c1] = chord_intersection(fan_polytope(5), vec({1, 1}), vec({1, 0}));
  EXPECT_NEAR(c0, -1.0, 1e-15);
  EXPECT_NEAR(c1, 1.0, 1e-15);
}

TEST(ChordIntersection, Errors) {
  const auto cube = hyperbox(EdgeLengths::equilateral(2));
  EXPECT_THROW(chord_intersection(cube, vec({3, 0}), vec({1, 0})), std::domain_error);
  EXPECT_THROW(chord_intersection(cube, vec({0, 0}), vec({0, 0})), std::invalid_argument);
  HPolytope half(1);
  half.add_row(vec({1}), 1.0);
  EXPECT_THROW(chord_intersection(half, vec({0}), vec({1})), std::runtime_error);  // unbounded
}

TEST(ChordIntersection, EndpointsOnBoundaryAndInteriorBetween) {
  auto rng = make_rng(21);
  for (const auto& P : {fan_polytope(9), slab_polytope(5, 1.5), half_space_polytope(6),
                        triangulation_polytope(spiral_triangulation(11), EdgeLengths::equilateral(11))}) {
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd x = rejection_sample(P, rng);
      const Eigen::VectorXd v = random_direction(rng, P.dim());
      const auto [t0, t1] = chord_intersection(P, x, v);
      EXPECT_LT(t0, 0.0);
      EXPECT_GT(t1, 0.0);
      EXPECT_TRUE(on_boundary(P, x + t0 * v));
      EXPECT_TRUE(on_boundary(P, x + t1 * v));
      for (int k = 0; k < 100; ++k) EXPECT_TRUE(P.contains(x + uniform(rng, t0, t1) * v));
    }
  }
}

TEST(SlabPolytope, RejectionVolumesMatchExactValues) {
  auto rng = make_rng(31);
  const std::pair<double, double> cases[] = {{0.5, 0.5}, {1.0, 4.0}, {1.5, 155.0 / 24.0}, {2.0, 23.0 / 3.0}};
  double previous = 0.0;
  for (auto [h, exact] : cases) {
    const auto est = rejection_volume_estimate(slab_polytope(3, h), rng, 1000000);
    EXPECT_NEAR(est.volume, exact, 3 * est.stderr_) << "h=" << h;
    EXPECT_GE(est.volume, previous);
    previous = est.volume;
  }
  const auto big = rejection_volume_estimate(slab_polytope(3, 3.0), rng, 10000);
  EXPECT_DOUBLE_EQ(big.volume, 8.0);
}

TEST(HalfSpacePolytope, RejectionVolumesMatchClosedForm) {
  auto rng = make_rng(41);
  for (int n = 1; n <= 6; ++n) {
    const auto est = rejection_volume_estimate(half_space_polytope(n), rng, 400000);
    const double exact = half_space_volume(n).get_d();
    EXPECT_NEAR(est.volume, exact, 3 * est.stderr_ + 1e-12) << n;
  }
  EXPECT_TRUE(half_space_polytope(1).contains(vec({0.5})));
  EXPECT_FALSE(half_space_polytope(1).contains(vec({-0.5})));
}

TEST(Centroid, HyperboxIsAtOrigin) {
  auto rng = make_rng(51);
  const auto c = centroid_estimate(hyperbox(EdgeLengths::equilateral(3)), rng, 200000);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.mean[i], 0.0, 3 * c.stderr_[i]);
}

TEST(Centroid, FanHexagonMatchesExpectedChordTable) {
  auto rng = make_rng(52);
  const auto c = centroid_estimate(fan_polytope(6), rng, 1000000);
  const double expected[] = {14.0 / 12, 15.0 / 12, 14.0 / 12};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.mean[i], expected[i], 3 * c.stderr_[i]) << i;
}

TEST(Centroid, FanHeptagonAndOctagonMatchExpectedChordTable) {
  auto rng = make_rng(54);
  const std::vector<std::vector<double>> rows{{461.0 / 385, 506.0 / 385, 506.0 / 385, 461.0 / 385},
                                              {1168.0 / 960, 1307.0 / 960, 1344.0 / 960, 1307.0 / 960, 1168.0 / 960}};
  for (const auto& expected : rows) {
    const int n = static_cast<int>(expected.size()) + 3;
    const auto c = centroid_estimate(fan_polytope(n), rng, 1000000);
    for (std::size_t i = 0; i < expected.size(); ++i)
      EXPECT_NEAR(c.mean[static_cast<Eigen::Index>(i)], expected[i], 3 * c.stderr_[static_cast<Eigen::Index>(i)]) << n << ' ' << i;
  }
}

TEST(Centroid, ConfinedFanHexagonMatchesTable) {
  auto rng = make_rng(53);
  const auto c = centroid_estimate(confined_fan_polytope(6, EdgeLengths::equilateral(6), 1.5), rng, 1000000);
  const double expected[] = {293.0 / 336, 316.0 / 336, 293.0 / 336};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.mean[i], expected[i], 3 * c.stderr_[i]) << i;
}

TEST(HitAndRun, OneDimensionalStepFromCentreIsUniform) {
  const auto P = hyperbox(EdgeLengths({1.0}));
  auto rng = make_rng(61);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(hit_and_run_step(P, Eigen::VectorXd::Zero(1), rng)[0]);
  EXPECT_GT(testsupport::ks_uniform_pvalue(xs, -1.0, 1.0), testsupport::kAlpha);
}

TEST(HitAndRun, SquareMeanIsCentred) {
  const auto P = hyperbox(EdgeLengths::equilateral(2));
  auto rng = make_rng(62);
  const auto c = centroid_estimate(P, rng, 1000000, CentroidMethod::HitAndRun);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(c.mean[i], 0.0, 3 * c.stderr_[i]);
}

TEST(HitAndRun, StaysStrictlyInterior) {
  const auto P = fan_polytope(10);
  auto rng = make_rng(63);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(7);
  for (int i = 0; i < 20000; ++i) {
    x = hit_and_run_step(P, x, rng);
    ASSERT_TRUE(P.strictly_contains(x));
  }
}

TEST(HitAndRun, FanHexagonCentroid) {
  auto rng = make_rng(64);
  const auto c = centroid_estimate(fan_polytope(6), rng, 400000, CentroidMethod::HitAndRun);
  const double expected[] = {14.0 / 12, 15.0 / 12, 14.0 / 12};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.mean[i], expected[i], 3 * c.stderr_[i]) << i;
}
