#pragma once

// 1-Lipschitz maps, pushforward measures, partial diameters and bracketed
// observable diameters diam(X -> Y, m - kappa).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmconc/separation.hpp"
#include "mmconc/space.hpp"

namespace mmconc {

/// Relative slack of the Lipschitz certificate: |f(x) - f(y)| may exceed
/// d(x, y) by this fraction (boundary moves add two rounded distances).
inline constexpr double kLipschitzSlack = 1e-12;

/// Map from a finite space into the real line, one value per source point.
struct RealMap {
  std::vector<double> values;
};

/// Map from a finite space into a finite screen, one screen index per point.
struct ScreenMap {
  std::vector<std::size_t> targets;
};

struct LipschitzVerdict {
  /// max |f(x) - f(y)| / d(x, y) over source pairs (0 for one point).
  double constant = 0.0;
  bool valid = false;
  /// Worst pair; meaningful when the source has >= 2 points.
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
};

LipschitzVerdict validate_lipschitz(const FiniteMMSpace& source, const RealMap& map);
LipschitzVerdict validate_lipschitz(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                    const ScreenMap& map);

/// f_*(mu) on the real line. Zero-weight fibers are dropped.
RealMeasure pushforward(const FiniteMMSpace& source, const RealMap& map);
/// f_*(mu) as the screen metric carrying the pushed weights.
FiniteMMSpace pushforward(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                          const ScreenMap& map);

/// d(., A) as a real map.
RealMap distance_function(const FiniteMMSpace& space, const PointSet& subset);

/// Smallest length of a closed interval carrying >= target_mass. 0 for
/// target <= 0, +inf for target > m.
double partial_diameter_real(const RealMeasure& nu, double target_mass);

struct ScreenBudget {
  /// Maximum number of positive-weight screen points (hard limit 64).
  std::size_t max_points = 20;
};

/// Exact smallest diameter of a subset carrying >= target_mass, by
/// threshold search plus maximum-weight clique enumeration. Throws
/// BudgetExceeded when the support is too large.
double partial_diameter_screen(const FiniteMMSpace& weighted_screen, double target_mass,
                               const ScreenBudget& budget = {});

/// Upper bound on the same quantity for spaces of any size: the smallest
/// diameter of a closed ball carrying target_mass.
double partial_diameter_ball_bound(const FiniteMMSpace& space, double target_mass);

struct Bracket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  /// Map achieving `lower`, verified 1-Lipschitz.
  std::variant<RealMap, ScreenMap> witness;
  /// Set A when the witness is d(., A); empty otherwise.
  PointSet witness_subset;
  std::string upper_source;
  bool upper_available = true;
  std::vector<std::string> diagnostics;
};

struct RealBracketOptions {
  /// Total coordinate moves of the local search, split over the chains.
  std::size_t effort = 4000;
  std::size_t chains = 8;
  /// Random subsets A for d(., A) when not enumerating all subsets.
  std::size_t random_subsets = 64;
  /// Enumerate every nonempty subset when the space has at most this many points.
  std::size_t all_subsets_up_to = 12;
  /// Sep witnesses are harvested at kappa' = kappa * factor.
  std::vector<double> witness_kappa_factors = {0.5, 1.0, 1.5, 2.0};
  /// Upper bound uses Sep(kappa * upper_factor, kappa * upper_factor).
  double upper_factor = 0.5;
  SepBudget sep_budget;
  SearchEffort sep_effort{2000, 500};
  std::uint64_t seed = 0;
};

/// lower: best partial diameter at m - kappa over distance functions and a
/// local search on Lipschitz-feasible values. upper: Sep(X; kappa/2, kappa/2).
Bracket obsdiam_real_bracket(const FiniteMMSpace& space, double kappa,
                             const RealBracketOptions& options = {});

struct ScreenSampling {
  std::size_t samples = 256;
  /// Assignment attempts per sample before it counts as starved.
  std::size_t node_budget_per_point = 64;
  ScreenBudget screen_budget;
  /// Exact source partial diameter for the upper bound up to this many points.
  std::size_t exact_upper_up_to = 24;
  /// Deterministic level-map candidates through d(., anchor): anchors in the
  /// source times start points in the screen, both spread evenly over the
  /// index range.
  std::size_t level_anchors = 16;
  std::size_t level_starts = 4;
  std::uint64_t seed = 0;
};

/// One random 1-Lipschitz map into the screen: random point order, each
/// point sent uniformly to a screen point compatible with all earlier
/// choices, depth-first backtracking on dead ends.
std::optional<ScreenMap> sample_screen_map(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                           std::mt19937_64& rng, std::size_t node_budget);

/// Level map through a real 1-Lipschitz g: the distinct values v_0 < v_1 < ...
/// of g are walked in order, v_0 going to `start` and v_j to the screen point
/// within v_j - v_i of every earlier image with the largest level-mass
/// weighted distance sum to them. The result is 1-Lipschitz whenever g is.
/// None when some level has no admissible image.
std::optional<ScreenMap> level_screen_map(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                          const RealMap& g, std::size_t start);

struct ScreenEstimate {
  Bracket bracket;
  std::size_t starved = 0;
};

/// lower: best partial diameter at m - kappa over sampled maps, level maps,
/// the constant map and, when admissible, the index map. upper: min(screen
/// diameter, partial diameter of mu itself at m - kappa).
ScreenEstimate obsdiam_screen_estimate(const FiniteMMSpace& space, const FiniteMMSpace& screen,
                                       double kappa, const ScreenSampling& options = {});

namespace reference {
/// Enumerates all subsets of the support; for small screens only.
double partial_diameter_screen_bruteforce(const FiniteMMSpace& weighted_screen, double target_mass);
}  // namespace reference

}  // namespace mmconc
