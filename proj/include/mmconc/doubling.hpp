#pragma once

// Doubling profiles r -> C(r) and the net machinery that turns a doubling
// bound into packing counts, colorings and concentration witnesses.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mmconc/space.hpp"

namespace mmconc {

/// Minimal doubling function of a finite space on (0, R]:
/// C(r) = max_x mass(B(x, 2r)) / mass(B(x, r)).
///
/// The grid always contains every distance and half-distance in (0, R].
/// Ball compositions at r and 2r are constant between consecutive grid
/// radii, so `at` is exact for every r in (0, R], not only on the grid.
class DoublingProfile {
 public:
  DoublingProfile(double horizon, std::vector<double> radii, std::vector<double> constants);

  double horizon() const { return horizon_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& constants() const { return constants_; }

  /// C(r) for 0 < r <= R. Throws PreconditionError outside that range.
  double at(double r) const;
  /// max of C over the grid.
  double sup() const;

 private:
  double horizon_;
  std::vector<double> radii_;
  std::vector<double> constants_;
};

/// Extra radii to evaluate on top of the breakpoint grid.
struct GridSpec {
  std::vector<double> extra_radii;
};

/// Throws PreconditionError on a zero-weight point (its small balls have
/// mass 0) or R <= 0.
DoublingProfile doubling_profile(const FiniteMMSpace& space, double horizon, const GridSpec& grid = {});

/// User-supplied doubling function as a step table: value of the entry
/// with the largest radius <= r. A single entry acts as a constant.
struct DoublingFunction {
  std::vector<double> radii;
  std::vector<double> values;

  static DoublingFunction constant(double c) { return {{0.0}, {c}}; }
  double operator()(double r) const;
};

/// (Y, nu) in D_{C,R}: the minimal profile stays below C on (0, R].
bool satisfies(const DoublingProfile& profile, const DoublingFunction& c);

/// Pointwise max of several profiles sharing the same horizon.
DoublingProfile envelope(std::span<const DoublingProfile> profiles);

/// max C(2^i r1) over the dyadic radii r1, 2 r1, ..., 2^j r1 <= 2 r2, the
/// constants used when B(y, r2) is covered by doubling B(x, r1).
/// Requires 0 < r1 <= r2 and 2 r2 <= R.
double lemma_constant(const DoublingProfile& profile, double r1, double r2);

/// (1 / C~^2) (r1 / r2)^(C~ / ln 2) with C~ = lemma_constant: a lower bound on
/// mass(B(x, r1)) / mass(B(y, r2)) for every x in B(y, r2).
double ratio_bound(const DoublingProfile& profile, double r1, double r2);

struct PackingCheck {
  /// C~(eps/3, 16 eps/3).
  double lemma_constant = 0.0;
  /// 2^(4 C~) C~^2; may be +inf for large C~.
  double bound = 0.0;
  std::size_t max_multiplicity = 0;
  bool holds = false;
};

/// Net points in any 5 eps ball versus the doubling packing bound.
/// Requires 32 eps <= 3 R.
PackingCheck packing_bound_check(const FiniteMMSpace& screen, const DoublingProfile& profile,
                                 const Net& net, double epsilon);

struct Coloring {
  /// J_1, ..., J_k.
  std::vector<PointSet> classes;
  /// Net member whose 5 eps ball holds the most net points.
  std::size_t center = 0;
  std::size_t k = 0;
};

/// Splits a net into k classes, each 5 eps-separated, where k is the largest
/// number of net points in a closed 5 eps ball. Class i is grown greedily in
/// index order from the i-th point of that ball, skipping the later ones.
Coloring color_net(const FiniteMMSpace& space, const Net& net, double epsilon);

/// Independent check: disjoint, exhaustive over the net, each class
/// 5 eps-separated.
bool is_valid_coloring(const FiniteMMSpace& space, const Net& net, const Coloring& coloring, double epsilon);

struct ConcentrationWitness {
  std::size_t center = 0;
  /// Pushed mass of B(center, 2 eps).
  double core_mass = 0.0;
  /// Pushed mass of B(center, 3 eps).
  double ball_mass = 0.0;
  /// Pushed mass outside B(center, 3 eps).
  double residual = 0.0;
  /// diam B(center, 3 eps) <= 6 eps.
  double ball_diameter = 0.0;
};

/// Net point whose 2 eps ball carries the most pushed mass (lowest index on
/// ties); none when that mass is below mass_floor.
std::optional<ConcentrationWitness> concentration_witness(const FiniteMMSpace& weighted_screen, const Net& net,
                                                          double epsilon, double mass_floor);

namespace reference {
/// Direct per-center, per-radius ball sums on one thread.
DoublingProfile doubling_profile_serial(const FiniteMMSpace& space, double horizon, const GridSpec& grid = {});
}  // namespace reference

}  // namespace mmconc
