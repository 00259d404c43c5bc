#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmconc/families.hpp"
#include "mmconc/parallel.hpp"
#include "mmconc/space.hpp"
#include "support/generators.hpp"

using namespace mmconc;

namespace {

RawSpace raw(std::vector<std::string> labels, std::vector<std::vector<double>> d, std::vector<double> w) {
  return RawSpace{std::move(labels), std::move(d), std::move(w), false};
}

FiniteMMSpace cycle4() {
  return make_space(raw({"v0", "v1", "v2", "v3"},
                        {{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}}, {0.25, 0.25, 0.25, 0.25}));
}

FiniteMMSpace z_n(std::size_t n) {
  FamilySpec spec = FamilySpec::discrete_torus(n);
  spec.normalize = false;
  return generate(spec);
}

}  // namespace

TEST(Validate, SinglePointIsValid) {
  const auto result = validate_space(raw({"x"}, {{0}}, {1}));
  EXPECT_TRUE(result.report.ok());
  ASSERT_TRUE(result.space.has_value());
  EXPECT_EQ(result.space->size(), 1u);
  EXPECT_EQ(result.space->diameter(), 0.0);
}

TEST(Validate, TwoPointSpaceIsValid) {
  const auto s = make_space(raw({"x1", "x2"}, {{0, 1}, {1, 0}}, {0.5, 0.5}));
  EXPECT_EQ(s.total_mass(), 1.0);
  EXPECT_EQ(s.distance(0, 1), 1.0);
}

TEST(Validate, ReportsTriangleViolationAtABC) {
  const auto result = validate_space(raw({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, {1, 1, 1}));
  ASSERT_FALSE(result.report.ok());
  EXPECT_FALSE(result.space.has_value());
  ASSERT_TRUE(result.report.has(ViolationKind::kTriangle));
  bool found = false;
  for (const auto& v : result.report.violations) {
    if (v.kind == ViolationKind::kTriangle && v.i == 0 && v.j == 1 && v.k == 2) found = true;
  }
  EXPECT_TRUE(found);
  EXPECT_NE(result.report.summary(std::vector<std::string>{"a", "b", "c"}).find("a"), std::string::npos);
}

TEST(Validate, FlagsEachAxiom) {
  auto kinds = [](const RawSpace& r) { return validate_space(r).report; };
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, 1}, {2, 0}}, {1, 1})).has(ViolationKind::kAsymmetry));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{1, 1}, {1, 0}}, {1, 1})).has(ViolationKind::kNonzeroDiagonal));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, -1}, {-1, 0}}, {1, 1})).has(ViolationKind::kNegativeDistance));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, 0}, {0, 0}}, {1, 1})).has(ViolationKind::kZeroDistance));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, 1}, {1, 0}}, {1, -1})).has(ViolationKind::kNegativeWeight));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, 1}, {1, 0}}, {0, 0})).has(ViolationKind::kZeroMass));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, 1}}, {1, 1})).has(ViolationKind::kShape));
  EXPECT_TRUE(kinds(raw({"a", "b"}, {{0, NAN}, {NAN, 0}}, {1, 1})).has(ViolationKind::kNonFinite));
}

TEST(Validate, ZeroMassAllowedWhenRequested) {
  RawSpace r = raw({"a", "b"}, {{0, 1}, {1, 0}}, {0, 0});
  r.allow_zero_mass = true;
  EXPECT_TRUE(validate_space(r).report.ok());
}

TEST(Validate, NormalizedHammingDistancesPassDespiteRounding) {
  // Sums like 1/7 + 2/7 and 3/7 differ in the last bit.
  for (std::size_t n : {6u, 7u, 9u}) {
    const auto cube = generate(FamilySpec::hamming_cube(n));
    EXPECT_TRUE(validate_space(cube.to_raw()).report.ok()) << n;
  }
}

TEST(Validate, ParallelTriangleCountMatchesReference) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + t % 12;
    RawSpace r = check::random_graph_space(rng, n).to_raw();
    // Break the metric in a few places.
    for (int k = 0; k < 3; ++k) {
      const std::size_t i = rng() % n;
      const std::size_t j = (i + 1 + rng() % (n - 1)) % n;
      r.dist[i][j] = r.dist[j][i] = r.dist[i][j] * 4.0;
    }
    for (int w : {1, 3}) {
      set_worker_count(w);
      EXPECT_EQ(validate_space(r).report.triangle_total, reference::count_triangle_violations(r));
    }
  }
  set_worker_count(1);
}

TEST(Validate, StoresAtMostCapPerKindButCountsAll) {
  const std::size_t n = 40;
  RawSpace r;
  r.dist.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    r.dist[i][i] = 0.0;
    r.labels.push_back(std::to_string(i));
    r.weights.push_back(1.0);
  }
  r.dist[0][1] = r.dist[1][0] = 3.0;
  const auto report = validate_space(r).report;
  EXPECT_EQ(report.triangle_total, reference::count_triangle_violations(r));
  EXPECT_GT(report.triangle_total, 0u);
  std::size_t stored = 0;
  for (const auto& v : report.violations) stored += v.kind == ViolationKind::kTriangle;
  EXPECT_LE(stored, ValidationReport::kMaxPerKind);
}

TEST(MergeDuplicates, CollapsesZeroDistancePoints) {
  const auto merged = merge_duplicates(raw({"a", "a2", "b"}, {{0, 0, 1}, {0, 0, 1}, {1, 1, 0}}, {0.25, 0.25, 0.5}));
  EXPECT_EQ(merged.merged_count, 1u);
  const auto s = make_space(merged.space);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.weight(0), 0.5);
  EXPECT_EQ(s.label(0), "a+a2");
}

TEST(Balls, RadiusZeroIsCenter) {
  const auto s = z_n(8);
  EXPECT_EQ(closed_ball(s, 3, 0.0), PointSet::single(3, 8));
  EXPECT_EQ(ball_mass(s, 3, 0.0), 0.125);
}

TEST(Balls, Z8UnitBall) {
  const auto s = z_n(8);
  EXPECT_EQ(closed_ball(s, 0, 1.0), PointSet({7, 0, 1}, 8));
  EXPECT_EQ(ball_mass(s, 0, 1.0), 3.0 / 8.0);
}

TEST(Balls, LargeRadiusIsEverything) {
  const auto s = z_n(8);
  EXPECT_EQ(closed_ball(s, 5, s.diameter()), PointSet::all(8));
  EXPECT_EQ(ball_mass(s, 5, 100.0), s.total_mass());
}

TEST(Nets, SmallEpsilonAdmitsAll) {
  const auto s = z_n(8);
  EXPECT_EQ(build_net(s, 1.0).members, PointSet::all(8));
}

TEST(Nets, HugeEpsilonAdmitsFirstInOrder) {
  const auto s = z_n(8);
  const std::vector<std::size_t> order{5, 0, 1, 2, 3, 4, 6, 7};
  EXPECT_EQ(build_net(s, 100.0, order).members, PointSet::single(5, 8));
}

TEST(Nets, FourCycleGreedy) {
  const auto s = cycle4();
  const Net net = build_net(s, 1.5);
  EXPECT_EQ(net.members, PointSet({0, 2}, 4));
  EXPECT_TRUE(is_valid_net(s, net));
}

TEST(Nets, RejectsBadSeedOrder) {
  const auto s = cycle4();
  const std::vector<std::size_t> order{0, 0, 1, 2};
  EXPECT_THROW(build_net(s, 1.0, order), InputError);
}

TEST(Nets, RandomNetsAreSeparatedAndMaximal) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto s = check::random_graph_space(rng, 3 + t % 15);
    const double eps = (1 + rng() % 8) / 4.0;
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const Net net = build_net(s, eps, order);
    ASSERT_TRUE(is_valid_net(s, net));
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_TRUE(net.members.contains(net.cover[i]));
      if (!net.members.contains(i)) {
        EXPECT_LT(s.distance(i, net.cover[i]), eps);
      }
    }
  }
}

TEST(Packing, Multiplicity) {
  const auto s = z_n(16);
  const Net net = build_net(s, 2.0);
  EXPECT_EQ(net.members.size(), 8u);
  for (std::size_t c : net.members) EXPECT_EQ(c % 2, 0u);
  EXPECT_EQ(packing_multiplicity(s, net, 0, 0.0), 1u);
  EXPECT_EQ(packing_multiplicity(s, net, 0, s.diameter()), 8u);
  // Even arcs within 8 of 0: all eight; radius 10 covers the whole circle.
  EXPECT_EQ(packing_multiplicity(s, net, 0, 10.0), 8u);
  EXPECT_EQ(packing_multiplicity(s, net, 0, 5.0), 5u);
}

TEST(PointSets, SortedAndChecked) {
  const PointSet p({3, 1, 3, 2}, 5);
  EXPECT_EQ(p.indices(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_THROW(PointSet({7}, 5), InputError);
}

TEST(Sets, MassDistanceDiameter) {
  const auto s = z_n(8);
  const PointSet a({0, 1}, 8);
  const PointSet b({4, 5}, 8);
  EXPECT_EQ(set_mass(s, a), 0.25);
  EXPECT_EQ(set_distance(s, a, b), 3.0);
  EXPECT_EQ(set_diameter(s, PointSet({0, 4}, 8)), 4.0);
  EXPECT_TRUE(std::isinf(set_distance(s, a, PointSet())));
}
