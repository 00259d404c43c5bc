#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmconc/doubling.hpp"
#include "mmconc/families.hpp"
#include "mmconc/observable.hpp"
#include "mmconc/parallel.hpp"
#include "support/generators.hpp"

using namespace mmconc;

namespace {

FiniteMMSpace z_n(std::size_t n) {
  FamilySpec spec = FamilySpec::discrete_torus(n);
  spec.normalize = false;
  return generate(spec);
}

FiniteMMSpace weighted_path(std::vector<double> w) {
  const std::size_t n = w.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::abs(static_cast<double>(i) - static_cast<double>(j));
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return FiniteMMSpace::from_metric_unchecked(labels, d, w);
}

// Smallest mass(B(x, r1)) / mass(B(y, r2)) over x in B(y, r2).
double worst_ratio(const FiniteMMSpace& s, double r1, double r2) {
  double worst = INFINITY;
  for (std::size_t y = 0; y < s.size(); ++y) {
    for (std::size_t x = 0; x < s.size(); ++x) {
      if (s.distance(x, y) <= r2) worst = std::min(worst, ball_mass(s, x, r1) / ball_mass(s, y, r2));
    }
  }
  return worst;
}

// Literal index range i = 1..ceil(log2(r2 / r1)).
double literal_constant(const DoublingProfile& p, double r1, double r2) {
  double c = 1.0;
  const int top = static_cast<int>(std::ceil(std::log2(r2 / r1)));
  for (int i = 1; i <= top; ++i) c = std::max(c, p.at(std::ldexp(r1, i)));
  return c;
}

}  // namespace

TEST(Profile, SinglePointIsOne) {
  const auto point = FiniteMMSpace::from_metric_unchecked({"p"}, {0.0}, {1.0});
  const auto p = doubling_profile(point, 1.0);
  EXPECT_EQ(p.sup(), 1.0);
  EXPECT_EQ(p.at(0.3), 1.0);
}

TEST(Profile, Z8UnitRadius) {
  const auto s = z_n(8);
  const auto p = doubling_profile(s, 4.0);
  EXPECT_DOUBLE_EQ(p.at(1.0), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.at(1.5), 7.0 / 3.0);
  EXPECT_EQ(p.at(0.5), 3.0);
  EXPECT_EQ(p.sup(), 3.0);
  EXPECT_DOUBLE_EQ(p.at(2.0), 8.0 / 5.0);
  EXPECT_EQ(p.at(4.0), 1.0);
  EXPECT_EQ(p.at(0.25), 1.0);
  EXPECT_THROW(p.at(0.0), PreconditionError);
  EXPECT_THROW(p.at(4.5), PreconditionError);
}

TEST(Profile, ExactBetweenGridPoints) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const auto s = check::random_graph_space(rng, 3 + t % 8);
    const double horizon = s.diameter();
    const auto p = doubling_profile(s, horizon);
    for (int k = 1; k <= 20; ++k) {
      const double r = horizon * k / 20.0;
      double direct = 1.0;
      for (std::size_t x = 0; x < s.size(); ++x) direct = std::max(direct, ball_mass(s, x, 2 * r) / ball_mass(s, x, r));
      EXPECT_NEAR(p.at(r), direct, 1e-12 * direct);
    }
  }
}

TEST(Profile, ParallelMatchesSerial) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 30; ++t) {
    const auto s = check::random_graph_space(rng, 2 + t % 20);
    const GridSpec grid{{0.3, 0.7}};
    const auto serial = reference::doubling_profile_serial(s, s.diameter(), grid);
    for (int w : {1, 3}) {
      set_worker_count(w);
      const auto fast = doubling_profile(s, s.diameter(), grid);
      ASSERT_EQ(fast.radii(), serial.radii());
      for (std::size_t k = 0; k < fast.radii().size(); ++k) {
        EXPECT_NEAR(fast.constants()[k], serial.constants()[k], 1e-12 * serial.constants()[k]);
      }
    }
  }
  set_worker_count(1);
}

TEST(Profile, RejectsZeroWeight) {
  const auto s = FiniteMMSpace::from_metric_unchecked({"a", "b"}, {0, 1, 1, 0}, {1.0, 0.0}, true);
  EXPECT_THROW(doubling_profile(s, 1.0), PreconditionError);
}

TEST(Profile, VertexTransitiveIndependentOfCenter) {
  const auto cube = generate(FamilySpec::hamming_cube(4));
  const auto p = doubling_profile(cube, 1.0);
  for (double r : p.radii()) {
    const double ref = ball_mass(cube, 0, 2 * r) / ball_mass(cube, 0, r);
    for (std::size_t x = 1; x < cube.size(); ++x) {
      EXPECT_DOUBLE_EQ(ball_mass(cube, x, 2 * r) / ball_mass(cube, x, r), ref);
    }
  }
}

TEST(Satisfies, ConstantFunctions) {
  const auto p = doubling_profile(z_n(8), 4.0);
  EXPECT_TRUE(satisfies(p, DoublingFunction::constant(3.0)));
  EXPECT_FALSE(satisfies(p, DoublingFunction::constant(2.9)));
  EXPECT_TRUE(satisfies(p, DoublingFunction{{0.0, 1.0, 2.0}, {3.0, 7.0 / 3.0, 1.6}}));
  EXPECT_FALSE(satisfies(p, DoublingFunction{{0.0, 1.0}, {3.0, 5.0 / 3.0}}));
}

TEST(Envelope, PointwiseMax) {
  const auto a = doubling_profile(z_n(8), 4.0);
  const auto b = doubling_profile(FiniteMMSpace::from_metric_unchecked({"p"}, {0.0}, {1.0}), 4.0);
  const std::vector<DoublingProfile> both{a, b};
  const auto e = envelope(both);
  for (double r : {0.5, 1.0, 2.0, 3.0, 4.0}) EXPECT_EQ(e.at(r), std::max(a.at(r), b.at(r)));
}

TEST(RatioBound, EqualRadii) {
  const auto s = z_n(8);
  const auto p = doubling_profile(s, 4.0);
  const double c = lemma_constant(p, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(ratio_bound(p, 1.0, 1.0), 1.0 / (c * c));
  EXPECT_LE(ratio_bound(p, 1.0, 1.0), 1.0);
}

TEST(RatioBound, Z8OneTwo) {
  const auto s = z_n(8);
  const auto p = doubling_profile(s, 4.0);
  EXPECT_DOUBLE_EQ(lemma_constant(p, 1.0, 2.0), std::max({p.at(1.0), p.at(2.0), p.at(4.0)}));
  EXPECT_LE(ratio_bound(p, 1.0, 2.0), worst_ratio(s, 1.0, 2.0));
  EXPECT_THROW(lemma_constant(p, 1.0, 2.5), PreconditionError);
  EXPECT_THROW(lemma_constant(p, 2.0, 1.0), PreconditionError);
}

TEST(RatioBound, SinglePoint) {
  const auto point = FiniteMMSpace::from_metric_unchecked({"p"}, {0.0}, {1.0});
  const auto p = doubling_profile(point, 2.0);
  EXPECT_EQ(ratio_bound(p, 0.5, 1.0), std::pow(0.5, 1.0 / std::log(2.0)));
  EXPECT_EQ(worst_ratio(point, 0.5, 1.0), 1.0);
}

TEST(RatioBound, LiteralIndexRangeFailsOnWeightedPath) {
  // Path 0-1-2 with weights 1, 4, 1 and r1 = r2 = 1. Without C(r1) the
  // constant is 1, the bound is 1, but mass(B(0,1)) / mass(B(1,1)) = 5/6.
  const auto s = weighted_path({1.0, 4.0, 1.0});
  const auto p = doubling_profile(s, 2.0);
  const double literal = literal_constant(p, 1.0, 1.0);
  const double literal_bound = std::pow(1.0, literal / std::log(2.0)) / (literal * literal);
  EXPECT_DOUBLE_EQ(worst_ratio(s, 1.0, 1.0), 5.0 / 6.0);
  EXPECT_GT(literal_bound, worst_ratio(s, 1.0, 1.0));
  EXPECT_LE(ratio_bound(p, 1.0, 1.0), worst_ratio(s, 1.0, 1.0));
}

TEST(RatioBound, HoldsOnRandomSpaces) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    const auto s = check::random_graph_space(rng, 2 + t % 10, 1.0);
    const double horizon = s.diameter();
    const auto p = doubling_profile(s, horizon);
    for (double r1 : {0.5, 1.0, 2.0}) {
      for (double r2 : {r1, 2 * r1, 3 * r1}) {
        if (2 * r2 > horizon) continue;
        EXPECT_LE(ratio_bound(p, r1, r2), worst_ratio(s, r1, r2) * (1 + 1e-12)) << t;
      }
    }
  }
}

TEST(Packing, SinglePointScreen) {
  const auto point = FiniteMMSpace::from_metric_unchecked({"p"}, {0.0}, {1.0});
  const auto p = doubling_profile(point, 1.0);
  const Net net = build_net(point, 0.05);
  const PackingCheck check = packing_bound_check(point, p, net, 0.05);
  EXPECT_EQ(check.max_multiplicity, 1u);
  EXPECT_GE(check.bound, 1.0);
  EXPECT_TRUE(check.holds);
}

TEST(Packing, Z16AndHammingFour) {
  const auto z16 = z_n(16);
  const auto pz = doubling_profile(z16, 8.0);
  const double eps = 0.75;  // 32 eps = 24 = 3 R
  EXPECT_TRUE(packing_bound_check(z16, pz, build_net(z16, eps), eps).holds);

  const auto cube = generate(FamilySpec::hamming_cube(4));
  const auto pc = doubling_profile(cube, 1.0);
  const double e = 3.0 / 32.0;
  EXPECT_TRUE(packing_bound_check(cube, pc, build_net(cube, e), e).holds);
  EXPECT_THROW(packing_bound_check(cube, pc, build_net(cube, 0.1), 0.1), PreconditionError);
}

TEST(Coloring, Z16AllPoints) {
  const auto s = z_n(16);
  const Net net = build_net(s, 1.0);
  ASSERT_EQ(net.members.size(), 16u);
  const Coloring c = color_net(s, net, 1.0);
  EXPECT_EQ(c.k, 11u);
  EXPECT_EQ(c.classes.size(), 11u);
  EXPECT_TRUE(is_valid_coloring(s, net, c, 1.0));
}

TEST(Coloring, SeparatedNetIsOneClass) {
  const auto s = z_n(16);
  const Net net = build_net(s, 8.0);
  const Coloring c = color_net(s, net, 1.0);
  EXPECT_EQ(c.k, 1u);
  ASSERT_EQ(c.classes.size(), 1u);
  EXPECT_EQ(c.classes[0], net.members);
}

TEST(Coloring, TwoClosePoints) {
  const auto s = FiniteMMSpace::from_metric_unchecked({"b1", "b2"}, {0, 1, 1, 0}, {0.5, 0.5});
  const Net net = build_net(s, 1.0);
  const Coloring c = color_net(s, net, 1.0);
  EXPECT_EQ(c.k, 2u);
  ASSERT_EQ(c.classes.size(), 2u);
  EXPECT_EQ(c.classes[0], PointSet::single(0, 2));
  EXPECT_EQ(c.classes[1], PointSet::single(1, 2));
}

TEST(Coloring, RandomNetsAreValid) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 100; ++t) {
    const auto s = check::random_graph_space(rng, 3 + t % 20, 1.0);
    const double eps = (1 + rng() % 4) / 4.0;
    const Net net = build_net(s, eps);
    EXPECT_TRUE(is_valid_coloring(s, net, color_net(s, net, eps), eps)) << t;
  }
}

TEST(Concentration, PointMassAndSmallScreen) {
  const auto z8 = z_n(8);
  std::vector<double> w(8, 0.0);
  w[3] = 1.0;
  const auto pushed = z8.with_weights(w);
  const Net net = build_net(z8, 1.0);
  const auto witness = concentration_witness(pushed, net, 1.0, 0.5);
  ASSERT_TRUE(witness.has_value());
  // Lowest-index net point whose 2-ball holds the atom.
  EXPECT_EQ(witness->center, 1u);
  EXPECT_EQ(witness->residual, 0.0);

  const auto wide = concentration_witness(z8, build_net(z8, 2.0), 2.0, 0.1);
  ASSERT_TRUE(wide.has_value());
  EXPECT_EQ(wide->residual, 0.0);
  EXPECT_FALSE(concentration_witness(z8, net, 0.25, 0.9).has_value());
}

TEST(Concentration, HammingSixIntoZ8Consistent) {
  const auto cube = generate(FamilySpec::hamming_cube(6));
  const auto z8 = generate(FamilySpec::discrete_torus(8));
  const auto est = obsdiam_screen_estimate(cube, z8, 0.1);
  const auto pushed = pushforward(cube, z8, std::get<ScreenMap>(est.bracket.witness));
  const double eps = 3.0 * z8.diameter() / 32.0;
  const auto witness = concentration_witness(pushed, build_net(z8, eps), eps, cube.total_mass() / 6);
  ASSERT_TRUE(witness.has_value());
  EXPECT_DOUBLE_EQ(witness->residual, cube.total_mass() - witness->ball_mass);
  EXPECT_LE(witness->ball_diameter, 6 * eps);
}
