#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "polysample/closed_forms.hpp"
#include "polysample/mcmc_stats.hpp"
#include "polysample/samplers.hpp"
#include "support/stats.hpp"

using namespace polysample;
using std::numbers::pi;

namespace {

McmcConfig base_config(int n, std::uint64_t steps, std::uint64_t seed) {
  McmcConfig c;
  c.n = n;
  c.steps = steps;
  c.seed = seed;
  return c;
}

// |mean - exact| within 4 IPS standard errors.
void expect_consistent(const std::vector<double>& series, double exact, const std::string& what) {
  const auto s = ips_variance(series);
  const double se = s.sigma() / std::sqrt(static_cast<double>(s.m));
  EXPECT_NEAR(s.mean, exact, 4 * se) << what;
}

}  // namespace

TEST(Steps, MomentStepKeepsDihedralsAndDihedralStepKeepsDiagonals) {
  auto rng = make_rng(1);
  const auto P = fan_polytope(7);
  ActionAngle aa = start_confined(7, rng);
  const Eigen::VectorXd theta0 = aa.theta;
  ChainCounters counters;
  moment_polytope_step(aa, P, 10, rng, &counters);
  EXPECT_EQ(aa.theta, theta0);
  EXPECT_TRUE(P.strictly_contains(aa.d));
  EXPECT_EQ(counters.polytope_steps, 1u);
  EXPECT_EQ(counters.hit_and_run_moves, 10u);
  const Eigen::VectorXd d0 = aa.d;
  dihedral_step(aa, rng, &counters);
  EXPECT_EQ(aa.d, d0);
  EXPECT_NE(aa.theta, theta0);
  EXPECT_EQ(counters.dihedral_steps, 1u);
}

TEST(Steps, BetaLimitsSelectOneKind) {
  auto rng = make_rng(2);
  const auto P = fan_polytope(6);
  ActionAngle aa = start_confined(6, rng);
  ChainCounters only_moment;
  for (int i = 0; i < 500; ++i) tsmcmc_step(aa, P, 1.0, 1, rng, &only_moment);
  EXPECT_EQ(only_moment.polytope_steps, 500u);
  EXPECT_EQ(only_moment.dihedral_steps, 0u);
  ChainCounters only_torus;
  for (int i = 0; i < 500; ++i) tsmcmc_step(aa, P, 0.0, 1, rng, &only_torus);
  EXPECT_EQ(only_torus.polytope_steps, 0u);
  EXPECT_EQ(only_torus.dihedral_steps, 500u);
}

TEST(Steps, BetaSetsTheMoveFrequency) {
  auto rng = make_rng(3);
  const auto P = fan_polytope(6);
  ActionAngle aa = start_confined(6, rng);
  ChainCounters c;
  const int N = 100000;
  for (int i = 0; i < N; ++i) tsmcmc_step(aa, P, 0.3, 1, rng, &c);
  const double p = static_cast<double>(c.polytope_steps) / N;
  EXPECT_NEAR(p, 0.3, 4 * std::sqrt(0.3 * 0.7 / N));
}

TEST(Steps, PermutationStepCountsRejections) {
  auto rng = make_rng(4);
  const auto t = fan_triangulation(8);
  const auto r = EdgeLengths::equilateral(8);
  const auto P = fan_polytope(8);
  ActionAngle aa = start_unconfined(t, r, P, rng);
  ChainCounters c;
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    if (permutation_step(aa, t, r, P, rng, &c)) ++accepted;
    ASSERT_TRUE(P.strictly_contains(aa.d));
  }
  EXPECT_EQ(c.permutation_steps, 1000u);
  EXPECT_EQ(c.permutation_steps - c.permutation_rejections, static_cast<std::uint64_t>(accepted));
  EXPECT_GT(accepted, 900);
}

TEST(CyclicPolygon, RegularAndGeneral) {
  const Polygon hex = cyclic_polygon(EdgeLengths::equilateral(6));
  for (int k = 0; k < 6; ++k) EXPECT_NEAR((hex[static_cast<std::size_t>((k + 1) % 6)] - hex[static_cast<std::size_t>(k)]).norm(), 1.0, 1e-12);
  EXPECT_NEAR(chord_length(hex, 3), 2.0, 1e-12);
  EXPECT_NEAR(total_curvature(hex), 2 * pi, 1e-10);

  // The longest edge is long enough that the centre lies outside the polygon.
  for (const auto& r : {EdgeLengths({1.0, 2.0, 1.5, 0.7, 1.2}), EdgeLengths({1.0, 1.0, 1.0, 2.9})}) {
    const Polygon p = cyclic_polygon(r);
    const auto e = edge_vectors(p);
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i].norm(), r[i], 1e-10);
    EXPECT_NEAR(z_width(p), 0.0, 1e-15);
    EXPECT_NEAR(total_curvature(p), 2 * pi, 1e-9);
  }
  EXPECT_THROW(cyclic_polygon(EdgeLengths({1.0, 1.0, 2.0})), std::invalid_argument);
}

TEST(StartPoints, UnconfinedStartIsInteriorForEveryTriangulation) {
  auto rng = make_rng(5);
  for (int n : {4, 5, 6, 9, 23, 40}) {
    const auto r = EdgeLengths::equilateral(n);
    for (const auto& t : {fan_triangulation(n), spiral_triangulation(n), teeth_triangulation(n),
                          random_triangulation(n, rng)}) {
      const auto P = triangulation_polytope(t, r);
      const auto aa = start_unconfined(t, r, P, rng);
      EXPECT_TRUE(P.strictly_contains(aa.d)) << n;
      const Polygon p = build_polygon(t, r, aa);
      EXPECT_LT(closure_defect(p), 1e-9);
    }
  }
}

TEST(StartPoints, ConfinedStartIsTheFoldedTriangle) {
  auto rng = make_rng(6);
  const auto aa = start_confined(10, rng);
  EXPECT_EQ(aa.d, Eigen::VectorXd::Ones(7));
  const Polygon p = build_polygon(fan_triangulation(10), EdgeLengths::equilateral(10), aa);
  EXPECT_LE(max_distance_from_first(p), 1.0 + 1e-12);
}

TEST(SampleArm, HeightsUniform) {
  auto rng = make_rng(7);
  const EdgeLengths r({1.0, 2.0});
  std::vector<double> z1, z2;
  for (int i = 0; i < 50000; ++i) {
    const Polygon arm = sample_arm(r, rng);
    z1.push_back(arm[1].z());
    z2.push_back(arm[2].z() - arm[1].z());
  }
  EXPECT_GT(testsupport::ks_uniform_pvalue(z1, -1.0, 1.0), testsupport::kAlpha);
  EXPECT_GT(testsupport::ks_uniform_pvalue(z2, -2.0, 2.0), testsupport::kAlpha);
}

TEST(SampleArm, EndToEndDistanceMatchesClosedForm) {
  // Mean of |end| for 3 unit steps, integrating the closed-form density.
  auto rng = make_rng(8);
  const auto r = EdgeLengths::equilateral(3);
  std::vector<double> ls;
  for (int i = 0; i < 200000; ++i) ls.push_back(sample_arm(r, rng)[3].norm());
  double exact = 0.0;
  const int M = 3000;
  for (int i = 0; i < M; ++i) {
    const double l = 3.0 * (i + 0.5) / M;
    exact += l * end_to_end_pdf(l, 3) * 3.0 / M;
  }
  const double m = testsupport::mean(ls);
  double var = 0.0;
  for (double x : ls) var += (x - m) * (x - m);
  EXPECT_NEAR(m, exact, 4 * std::sqrt(var / ls.size() / ls.size()));
}

TEST(McmcConfig, Validation) {
  auto c = base_config(6, 10, 1);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.burnin_steps(), 60u);
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = base_config(3, 10, 1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = base_config(6, 10, 1);
  c.confine_radius = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);  // spiral by default
  c.triangulation = TriangulationKind::Fan;
  EXPECT_NO_THROW(c.validate());
  c.confine_radius = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.confine_radius = 1.5;
  c.delta = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = base_config(4, 10, 1);
  c.edge_lengths = EdgeLengths({1.0, 1.0, 1.0, 3.5});
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Observables, NamesAndErrors) {
  const Polygon sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, true);
  const ActionAngle aa{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, pi)};
  EXPECT_NEAR(make_observable("total_curvature").f(sq, aa), 2 * pi, 1e-12);
  EXPECT_NEAR(make_observable("chord:2").f(sq, aa), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(make_observable("squared_chord:2").f(sq, aa), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(make_observable("zwidth").f(sq, aa), 0.0);
  EXPECT_THROW(make_observable("chord:"), std::invalid_argument);
  EXPECT_THROW(make_observable("chord:x"), std::invalid_argument);
  EXPECT_THROW(make_observable("gyration"), std::invalid_argument);
}

TEST(RunChain, DeterministicForFixedSeed) {
  const std::vector<Observable> obs{make_observable("total_curvature"), make_observable("chord:3")};
  const auto a = run_chain(base_config(9, 2000, 77), obs);
  const auto b = run_chain(base_config(9, 2000, 77), obs);
  const auto c = run_chain(base_config(9, 2000, 78), obs);
  EXPECT_EQ(a.series, b.series);
  EXPECT_NE(a.series, c.series);
  EXPECT_EQ(a.names, (std::vector<std::string>{"total_curvature", "chord:3"}));
}

TEST(RunChain, ZeroStepsRecordsNothing) {
  std::uint64_t calls = 0;
  const auto res = run_chain(base_config(7, 0, 1), {make_observable("zwidth")},
                             [&](std::uint64_t, const Polygon&, const ActionAngle&) { ++calls; });
  ASSERT_EQ(res.series.size(), 1u);
  EXPECT_TRUE(res.series[0].empty());
  EXPECT_EQ(calls, 0u);
  EXPECT_EQ(res.counters.polytope_steps + res.counters.dihedral_steps, 70u);
}

TEST(RunChain, SinkSeesEveryRecordedStep) {
  std::vector<std::uint64_t> seen;
  auto cfg = base_config(6, 50, 3);
  cfg.burnin = 5;
  run_chain(cfg, {}, [&](std::uint64_t i, const Polygon& p, const ActionAngle&) {
    seen.push_back(i);
    EXPECT_LT(closure_defect(p), 1e-10);
  });
  ASSERT_EQ(seen.size(), 50u);
  for (std::uint64_t i = 0; i < 50; ++i) EXPECT_EQ(seen[i], i);
}

TEST(RunChain, ConfinedChainStaysInTheBall) {
  auto cfg = base_config(6, 20000, 11);
  cfg.triangulation = TriangulationKind::Fan;
  cfg.confine_radius = 1.5;
  double worst = 0.0;
  run_chain(cfg, {}, [&](std::uint64_t, const Polygon& p, const ActionAngle&) {
    worst = std::max(worst, max_distance_from_first(p));
  });
  EXPECT_LE(worst, 1.5 + 1e-9);
  EXPECT_GT(worst, 1.2);
}

TEST(RunChain, PentagonDiagonalsMatchRejectionSampling) {
  auto cfg = base_config(5, 400000, 21);
  cfg.triangulation = TriangulationKind::Fan;
  std::vector<double> chain_d1;
  run_chain(cfg, {}, [&](std::uint64_t i, const Polygon&, const ActionAngle& aa) {
    if (i % 20 == 0) chain_d1.push_back(aa.d[0]);
  });
  auto rng = make_rng(22);
  const auto P = fan_polytope(5);
  std::vector<double> iid;
  for (int i = 0; i < 20000; ++i) iid.push_back(rejection_sample(P, rng)[0]);
  EXPECT_GT(testsupport::ks_pvalue(chain_d1, iid), testsupport::kAlpha);
}

TEST(RunChain, DihedralsAreUniform) {
  std::vector<double> theta;
  run_chain(base_config(7, 100000, 31), {}, [&](std::uint64_t i, const Polygon&, const ActionAngle& aa) {
    if (i % 10 == 0) theta.push_back(aa.theta[2]);
  });
  EXPECT_GT(testsupport::ks_uniform_pvalue(theta, 0.0, 2 * pi), testsupport::kAlpha);
}

TEST(RunChain, SquaredChordMatchesExactForSeveralBetas) {
  for (double beta : {0.3, 0.5, 0.7}) {
    auto cfg = base_config(8, 200000, 41);
    cfg.beta = beta;
    const auto res = run_chain(cfg, {make_observable("squared_chord:3")});
    expect_consistent(res.series[0], expected_squared_chord(3, 8).get_d(), "beta=" + std::to_string(beta));
  }
}

TEST(RunChain, PermutationsPreserveTheDistribution) {
  auto cfg = base_config(8, 200000, 42);
  cfg.delta = 0.3;
  const auto res = run_chain(cfg, {make_observable("squared_chord:4")});
  expect_consistent(res.series[0], expected_squared_chord(4, 8).get_d(), "delta=0.3");
  EXPECT_GT(res.counters.permutation_steps, 0u);
}

TEST(RunChain, HexagonOctantHasProbabilityOneEighth) {
  auto cfg = base_config(6, 200000, 43);
  const auto res = run_chain(cfg, {make_observable("octant6")});
  expect_consistent(res.series[0], 0.125, "octant6");
}

TEST(RunChain, TotalCurvatureMatchesClosedForm) {
  const auto res = run_chain(base_config(10, 200000, 44), {make_observable("total_curvature")});
  expect_consistent(res.series[0], expected_total_curvature(10), "kappa(10)");
}
