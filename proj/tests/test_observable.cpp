#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "mmconc/families.hpp"
#include "mmconc/observable.hpp"
#include "mmconc/parallel.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace mmconc;

namespace {

FiniteMMSpace two_point() {
  return make_space(RawSpace{{"x1", "x2"}, {{0, 1}, {1, 0}}, {0.5, 0.5}, false});
}

FiniteMMSpace path3() {
  const double t = 1.0 / 3.0;
  return make_space(RawSpace{{"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}, {t, t, t}, false});
}

FiniteMMSpace z_n(std::size_t n) {
  FamilySpec spec = FamilySpec::discrete_torus(n);
  spec.normalize = false;
  return generate(spec);
}

FiniteMMSpace unit_square(std::vector<double> w) {
  const double r = std::sqrt(2.0);
  return make_space(RawSpace{{"a", "b", "c", "d"},
                             {{0, 1, r, 1}, {1, 0, 1, r}, {r, 1, 0, 1}, {1, r, 1, 0}},
                             std::move(w), true});
}

}  // namespace

TEST(Lipschitz, ConstantAndIdentity) {
  const auto s = z_n(8);
  const auto constant = validate_lipschitz(s, RealMap{std::vector<double>(8, 2.0)});
  EXPECT_TRUE(constant.valid);
  EXPECT_EQ(constant.constant, 0.0);
  std::vector<std::size_t> id(8);
  for (std::size_t i = 0; i < 8; ++i) id[i] = i;
  const auto identity = validate_lipschitz(s, s, ScreenMap{id});
  EXPECT_TRUE(identity.valid);
  EXPECT_EQ(identity.constant, 1.0);
}

TEST(Lipschitz, DistanceFromZeroOnZ8) {
  const auto s = z_n(8);
  const RealMap f = distance_function(s, PointSet::single(0, 8));
  EXPECT_EQ(f.values, (std::vector<double>{0, 1, 2, 3, 4, 3, 2, 1}));
  EXPECT_TRUE(validate_lipschitz(s, f).valid);
}

TEST(Lipschitz, ReportsWorstPair) {
  const auto s = path3();
  const auto v = validate_lipschitz(s, RealMap{{0.0, 3.0, 3.0}});
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.constant, 3.0);
  EXPECT_EQ(v.worst_i, 0u);
  EXPECT_EQ(v.worst_j, 1u);
  EXPECT_THROW(validate_lipschitz(s, RealMap{{0.0, 1.0}}), InputError);
}

TEST(Pushforward, ConstantIdentityAndTwoPoint) {
  const auto s = path3();
  const auto constant = pushforward(s, RealMap{{5, 5, 5}});
  ASSERT_EQ(constant.size(), 1u);
  EXPECT_EQ(constant.atoms()[0].weight, s.total_mass());
  std::vector<std::size_t> id{0, 1, 2};
  const auto same = pushforward(s, s, ScreenMap{id});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(same.weight(i), s.weight(i));
  const auto two = two_point();
  const auto nu = pushforward(two, RealMap{{0.25, 1.0}});
  ASSERT_EQ(nu.size(), 2u);
  EXPECT_LE(nu.atoms()[1].position - nu.atoms()[0].position, 1.0);
}

TEST(PartialDiameterReal, Examples) {
  const auto uniform = RealMeasure::from_values(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(partial_diameter_real(uniform, 0.75), 2.0);
  EXPECT_EQ(partial_diameter_real(uniform, 0.0), 0.0);
  EXPECT_EQ(partial_diameter_real(uniform, -1.0), 0.0);
  EXPECT_EQ(partial_diameter_real(uniform, 1.0), 3.0);
  EXPECT_TRUE(std::isinf(partial_diameter_real(uniform, 1.5)));
  const auto halves = RealMeasure::from_pairs({{0.0, 0.5}, {1.0, 0.5}});
  EXPECT_EQ(partial_diameter_real(halves, 0.5), 0.0);
}

TEST(PartialDiameterReal, MatchesWindowOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 12;
    std::vector<RealMeasure::Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) atoms.push_back({static_cast<double>(rng() % 40) / 8.0, (1 + rng() % 16) / 16.0});
    const auto nu = RealMeasure::from_pairs(atoms);
    std::vector<double> pos;
    std::vector<double> w;
    for (const auto& a : nu.atoms()) {
      pos.push_back(a.position);
      w.push_back(a.weight);
    }
    const double target = check::random_kappa(rng, nu.total_mass());
    EXPECT_EQ(partial_diameter_real(nu, target), check::window_oracle(pos, w, target));
  }
}

TEST(PartialDiameterScreen, Examples) {
  const auto point = make_space(RawSpace{{"p"}, {{0}}, {1.0}, false});
  EXPECT_EQ(partial_diameter_screen(point, 1.0), 0.0);
  const auto sq = unit_square({0.4, 0.1, 0.4, 0.1});
  EXPECT_EQ(partial_diameter_screen(sq, 0.8), std::sqrt(2.0));
  EXPECT_EQ(reference::partial_diameter_screen_bruteforce(sq, 0.8), std::sqrt(2.0));
  const auto z8 = z_n(8);
  EXPECT_EQ(partial_diameter_screen(z8, z8.total_mass()), 4.0);
}

TEST(PartialDiameterScreen, ZeroWeightPointsIgnored) {
  const auto sq = unit_square({0.5, 0.0, 0.0, 0.5});
  EXPECT_EQ(partial_diameter_screen(sq, 1.0), 1.0);
}

TEST(PartialDiameterScreen, MatchesBruteForce) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto s = check::random_graph_space(rng, 1 + t % 12, 4.0, 0);
    if (!(s.total_mass() > 0)) continue;
    const double target = check::random_kappa(rng, s.total_mass()) + (t % 3 == 0 ? s.total_mass() / 2 : 0.0);
    EXPECT_EQ(partial_diameter_screen(s, target), reference::partial_diameter_screen_bruteforce(s, target)) << t;
  }
}

TEST(PartialDiameterScreen, BudgetRefusal) {
  const auto s = z_n(30);
  EXPECT_THROW(partial_diameter_screen(s, 0.9, ScreenBudget{20}), BudgetExceeded);
  EXPECT_NO_THROW(partial_diameter_screen(s, 0.9, ScreenBudget{30}));
}

TEST(PartialDiameterBallBound, IsAnUpperBound) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 100; ++t) {
    const auto s = check::random_graph_space(rng, 2 + t % 10);
    const double target = check::random_kappa(rng, s.total_mass());
    EXPECT_GE(partial_diameter_ball_bound(s, target), partial_diameter_screen(s, target));
  }
}

TEST(RealBracket, TwoPointSpace) {
  const Bracket b = obsdiam_real_bracket(two_point(), 0.5);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 1.0);
  EXPECT_TRUE(b.upper_available);
}

TEST(RealBracket, Singleton) {
  const auto point = make_space(RawSpace{{"p"}, {{0}}, {1.0}, false});
  const Bracket b = obsdiam_real_bracket(point, 0.25);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 0.0);
}

TEST(RealBracket, PathOfThree) {
  const auto s = path3();
  const Bracket b = obsdiam_real_bracket(s, 0.3);
  EXPECT_EQ(b.lower, 2.0);
  EXPECT_NEAR(check::lipschitz_grid_oracle(s, s.total_mass() - 0.3, 0.05), 2.0, 1e-9);
  const auto& f = std::get<RealMap>(b.witness);
  EXPECT_TRUE(validate_lipschitz(s, f).valid);
  EXPECT_EQ(partial_diameter_real(pushforward(s, f), s.total_mass() - 0.3), b.lower);
}

TEST(RealBracket, WitnessAlwaysCertifiedAndBelowUpper) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 40; ++t) {
    const auto s = check::random_graph_space(rng, 2 + t % 8);
    const double kappa = check::random_kappa(rng, s.total_mass() / 4);
    RealBracketOptions opt;
    opt.seed = t;
    const Bracket b = obsdiam_real_bracket(s, kappa, opt);
    const auto& f = std::get<RealMap>(b.witness);
    EXPECT_TRUE(validate_lipschitz(s, f).valid);
    EXPECT_EQ(partial_diameter_real(pushforward(s, f), s.total_mass() - kappa), b.lower);
    EXPECT_LE(b.lower, b.upper);
  }
}

TEST(RealBracket, SameAcrossWorkerCounts) {
  std::mt19937_64 rng(35);
  const auto s = check::random_graph_space(rng, 9);
  set_worker_count(1);
  const Bracket a = obsdiam_real_bracket(s, 0.2);
  set_worker_count(4);
  const Bracket b = obsdiam_real_bracket(s, 0.2);
  set_worker_count(1);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(std::get<RealMap>(a.witness).values, std::get<RealMap>(b.witness).values);
}

TEST(ScreenEstimate, SingletonScreen) {
  const auto point = make_space(RawSpace{{"p"}, {{0}}, {1.0}, false});
  const auto est = obsdiam_screen_estimate(path3(), point, 0.3);
  EXPECT_EQ(est.bracket.lower, 0.0);
  EXPECT_EQ(est.bracket.upper, 0.0);
}

TEST(ScreenEstimate, IdentityIntoItself) {
  const auto s = z_n(8);
  const double kappa = 0.2;
  const auto est = obsdiam_screen_estimate(s, s, kappa);
  EXPECT_GE(est.bracket.lower, partial_diameter_screen(s, s.total_mass() - kappa));
  EXPECT_LE(est.bracket.lower, est.bracket.upper);
}

TEST(ScreenEstimate, UpperBoundHoldsWhereHalfKappaSepFails) {
  // Z16 into itself by the identity, kappa = 1/2: the pushforward is the
  // uniform measure, whose partial diameter at mass 1/2 is 7, while
  // Sep(1/4, 1/4) is only 5. The reported upper bound must stay above 7.
  const auto s = z_n(16);
  const double kappa = 0.5;
  const double identity_value = partial_diameter_screen(s, s.total_mass() - kappa);
  EXPECT_EQ(identity_value, 7.0);
  EXPECT_EQ(sep_exact(s, {0.25, 0.25}, SepBudget{43046721}).value, 5.0);
  const auto est = obsdiam_screen_estimate(s, s, kappa);
  EXPECT_GE(est.bracket.lower, 7.0);
  EXPECT_GE(est.bracket.upper, identity_value);
}

TEST(ScreenEstimate, HammingFourIntoZ8IsPositiveAndMatchesEnumeration) {
  const auto cube = generate(FamilySpec::hamming_cube(4));
  const auto z8 = generate(FamilySpec::discrete_torus(8));
  const auto est = obsdiam_screen_estimate(cube, z8, 0.2);
  EXPECT_GT(est.bracket.lower, 0.0);
  const auto& map = std::get<ScreenMap>(est.bracket.witness);
  EXPECT_TRUE(validate_lipschitz(cube, z8, map).valid);

  // Exhaustive map enumeration on a 5-point subspace against sampling.
  const auto sub = cube.subspace(PointSet({0, 1, 3, 7, 15}, 16));
  const double target = sub.total_mass() - 0.2 * sub.total_mass();
  double best = 0.0;
  std::vector<std::size_t> t(5, 0);
  for (std::size_t code = 0; code < 32768; ++code) {
    std::size_t c = code;
    for (auto& x : t) {
      x = c % 8;
      c /= 8;
    }
    if (!validate_lipschitz(sub, z8, ScreenMap{t}).valid) continue;
    best = std::max(best, partial_diameter_screen(pushforward(sub, z8, ScreenMap{t}), target));
  }
  const auto sampled = obsdiam_screen_estimate(sub, z8, 0.2 * sub.total_mass());
  EXPECT_LE(sampled.bracket.lower, best);
  EXPECT_EQ(sampled.bracket.lower, best);
}

TEST(ScreenSampler, MapsAreLipschitz) {
  std::mt19937_64 rng(36);
  const auto z8 = z_n(8);
  for (int t = 0; t < 50; ++t) {
    const auto s = check::random_graph_space(rng, 3 + t % 10, 1.0);
    auto local = stream_rng(7, t);
    const auto map = sample_screen_map(s, z8, local, 1000);
    ASSERT_TRUE(map.has_value());
    EXPECT_TRUE(validate_lipschitz(s, z8, *map).valid);
  }
}

TEST(LevelMap, CountMapOnFiveCube) {
  const auto cube = generate(FamilySpec::hamming_cube(5));
  const auto torus = generate(FamilySpec::discrete_torus(8));
  const auto g = distance_function(cube, PointSet::single(0, cube.size()));
  const auto map = level_screen_map(cube, torus, g, 0);
  ASSERT_TRUE(map.has_value());
  EXPECT_TRUE(validate_lipschitz(cube, torus, *map).valid);
  for (std::size_t x = 0; x < cube.size(); ++x) {
    EXPECT_EQ(map->targets[x], static_cast<std::size_t>(std::popcount(x)));
  }
  EXPECT_EQ(partial_diameter_screen(pushforward(cube, torus, *map), 0.9), 0.375);
}

TEST(LevelMap, LipschitzOnRandomSpaces) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    const auto s = check::random_graph_space(rng, 2 + t % 12);
    const auto screen = check::random_graph_space(rng, 2 + t % 7);
    const RealMap g{check::random_lipschitz_values(rng, s)};
    const auto map = level_screen_map(s, screen, g, t % screen.size());
    ASSERT_TRUE(map.has_value());
    EXPECT_TRUE(validate_lipschitz(s, screen, *map).valid) << t;
  }
}

TEST(ScreenEstimate, HammingSixReachesTorusDiameter) {
  // The wrapped count map spreads 0.9 of the mass over more than half the circle.
  const auto cube = generate(FamilySpec::hamming_cube(6));
  const auto torus = generate(FamilySpec::discrete_torus(8));
  const auto est = obsdiam_screen_estimate(cube, torus, 0.1);
  EXPECT_EQ(est.bracket.lower, 0.5);
  EXPECT_EQ(est.bracket.upper, 0.5);
}
