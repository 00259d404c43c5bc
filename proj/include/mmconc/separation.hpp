#pragma once

// Separation distance Sep(X; k_0, ..., k_N): the largest t for which N+1
// disjoint subsets of masses >= k_i lie pairwise at distance >= t.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmconc/space.hpp"

namespace mmconc {

/// Mass requirements k_0, ..., k_N of a separation query (N >= 1).
class SepQuery {
 public:
  /// Throws InputError unless there are >= 2 finite, nonnegative entries.
  explicit SepQuery(std::vector<double> kappas);
  SepQuery(std::initializer_list<double> kappas) : SepQuery(std::vector<double>(kappas)) {}

  const std::vector<double>& kappas() const { return kappas_; }
  std::size_t groups() const { return kappas_.size(); }

 private:
  std::vector<double> kappas_;
};

struct SepResult {
  double value = 0.0;
  bool feasible = false;
  bool exact = false;
  /// One point set per kappa, present iff feasible.
  std::vector<PointSet> witnesses;
};

/// Cap on (N+2)^n, the number of point-to-group assignments. The default
/// admits n <= 13 for two groups.
struct SepBudget {
  std::uint64_t max_assignments = 1594323;  // 3^13
};

/// Number of assignments sep_exact would enumerate, saturating at UINT64_MAX.
std::uint64_t sep_assignment_count(std::size_t points, std::size_t groups);
bool sep_exact_fits(const FiniteMMSpace& space, const SepQuery& query, const SepBudget& budget = {});

/// Exhaustive maximum over assignments of points to groups or "discarded".
/// Groups must be nonempty and reach their mass; ties go to the
/// lexicographically smallest assignment vector (0 = discarded, g+1 = group g).
/// Branch-and-bound across OpenMP workers; throws BudgetExceeded.
SepResult sep_exact(const FiniteMMSpace& space, const SepQuery& query, const SepBudget& budget = {});

struct SearchEffort {
  /// Local-search moves per probed threshold.
  std::size_t moves = 10000;
  /// Moves without improvement before a random restart.
  std::size_t restart_after = 2000;
};

/// Certified lower bound: binary search over the distinct distances, probing
/// each threshold with component seeding plus randomized local moves.
/// Witnesses are verified before being returned. Deterministic given seed.
SepResult sep_lower_bound(const FiniteMMSpace& space, const SepQuery& query,
                          const SearchEffort& effort, std::uint64_t seed);

/// Checks that an assignment of witnesses is admissible and returns its
/// min inter-group distance (negative when not admissible).
double verify_witnesses(const FiniteMMSpace& space, const SepQuery& query,
                        std::span<const PointSet> witnesses);

/// Finite measure on the real line: atoms sorted by strictly increasing
/// position, every weight > 0.
class RealMeasure {
 public:
  struct Atom {
    double position;
    double weight;
  };

  RealMeasure() = default;
  /// Sorts, merges equal positions (summing weights) and drops zero weights.
  /// Throws InputError on negative or non-finite input.
  static RealMeasure from_pairs(std::vector<Atom> atoms);
  /// Atoms at values[i] with weight weights[i].
  static RealMeasure from_values(std::span<const double> values, std::span<const double> weights);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_mass_; }
  double max_weight() const;

  /// The atoms as a one-dimensional mm-space with |x - y|.
  FiniteMMSpace as_space() const;

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

struct QuantileGap {
  double a0 = 0.0;
  double b0 = 0.0;
  /// max(b0 - a0, 0).
  double gap = 0.0;
  /// b0 < a0 (only possible when 2 kappa >= m).
  bool degenerate = false;
};

/// a0 = sup{a : nu((-inf, a)) <= kappa}, b0 = inf{b : nu((b, +inf)) <= kappa}.
QuantileGap sep_real_quantile(const RealMeasure& nu, double kappa);

struct RealMap;
struct ScreenMap;

/// Sep(f_* mu; kappas) <= Sep(mu; kappas) for a 1-Lipschitz f, both sides by
/// sep_exact. Throws PreconditionError if f is not 1-Lipschitz and
/// BudgetExceeded if either side is too large.
bool sep_pushforward_check(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                           const ScreenMap& map, const SepQuery& query, const SepBudget& budget = {});
bool sep_pushforward_check(const FiniteMMSpace& source, const RealMap& map, const SepQuery& query,
                           const SepBudget& budget = {});

namespace reference {
/// Plain odometer over all (N+2)^n assignments; no pruning, one thread.
SepResult sep_exact_serial(const FiniteMMSpace& space, const SepQuery& query,
                           const SepBudget& budget = {});
}  // namespace reference

}  // namespace mmconc
