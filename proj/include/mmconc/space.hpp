#pragma once

// Finite metric-measure spaces: validation, closed balls, greedy nets and
// packing counts. Every other module is built on these primitives.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmconc/error.hpp"

namespace mmconc {

/// Relative slack used when checking the triangle inequality on stored
/// floating-point distances (normalized Hamming distances k/n round).
inline constexpr double kTriangleSlack = 1e-12;

/// Candidate space as read from a file or built by hand. Nothing is checked.
struct RawSpace {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> dist;
  std::vector<double> weights;
  bool allow_zero_mass = false;
};

class FiniteMMSpace;

/// Set of point indices into one space; sorted, without duplicates.
class PointSet {
 public:
  PointSet() = default;
  /// Sorts and deduplicates. Throws InputError on indices >= universe.
  PointSet(std::vector<std::size_t> indices, std::size_t universe);

  static PointSet all(std::size_t universe);
  static PointSet single(std::size_t index, std::size_t universe);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(std::size_t index) const;
  const std::vector<std::size_t>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// Immutable finite mm-space: labels, full distance matrix, weights.
/// Instances exist only after the metric and measure axioms were checked.
class FiniteMMSpace {
 public:
  std::size_t size() const { return weights_.size(); }
  double distance(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {dist_.data() + i * size(), size()};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  /// Sum of the weights, accumulated in index order.
  double total_mass() const { return total_mass_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  double diameter() const { return diameter_; }
  /// Sorted distinct positive distances.
  const std::vector<double>& distinct_distances() const { return distinct_; }

  /// Same metric, different measure. Weights must be nonnegative.
  FiniteMMSpace with_weights(std::vector<double> weights) const;
  /// Subspace on the given points (restricted metric and weights).
  FiniteMMSpace subspace(const PointSet& points) const;

  RawSpace to_raw() const;

  /// Used by generators whose output is a metric by construction. Checks
  /// everything except the O(n^3) triangle inequality.
  static FiniteMMSpace from_metric_unchecked(std::vector<std::string> labels,
                                             std::vector<double> flat_dist,
                                             std::vector<double> weights,
                                             bool allow_zero_mass = false);

 private:
  friend struct SpaceBuilder;
  FiniteMMSpace() = default;
  void finalize();

  std::vector<std::string> labels_;
  std::vector<double> dist_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
  double diameter_ = 0.0;
  std::vector<double> distinct_;
};

enum class ViolationKind {
  kShape,
  kNonFinite,
  kAsymmetry,
  kNonzeroDiagonal,
  kNegativeDistance,
  kZeroDistance,
  kTriangle,
  kNegativeWeight,
  kZeroMass,
};

const char* to_string(ViolationKind kind);

/// One violated axiom with its offending indices (unused slots are npos).
struct Violation {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  ViolationKind kind;
  std::size_t i = npos;
  std::size_t j = npos;
  std::size_t k = npos;
  double value = 0.0;

  std::string describe(std::span<const std::string> labels = {}) const;
};

struct ValidationReport {
  /// Stored violations; capped per kind at kMaxPerKind.
  std::vector<Violation> violations;
  /// Total number of triangle violations, including those not stored.
  std::size_t triangle_total = 0;

  static constexpr std::size_t kMaxPerKind = 256;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary(std::span<const std::string> labels = {}) const;
};

struct ValidationResult {
  std::optional<FiniteMMSpace> space;
  ValidationReport report;
};

/// Checks every FiniteMMSpace invariant. The triangle pass is the only
/// O(n^3) step and runs across OpenMP workers.
ValidationResult validate_space(const RawSpace& raw);

/// validate_space, throwing ValidationError when any axiom fails.
FiniteMMSpace make_space(const RawSpace& raw);

class ValidationError : public InputError {
 public:
  ValidationError(ValidationReport report, std::vector<std::string> labels);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct MergeResult {
  RawSpace space;
  /// groups[i] = original indices merged into new point i.
  std::vector<std::vector<std::size_t>> groups;
  std::size_t merged_count = 0;
};

/// Collapses points at distance 0 from each other into their lowest-index
/// representative, summing weights. Labels of merged points are joined by '+'.
MergeResult merge_duplicates(const RawSpace& raw);

double set_mass(const FiniteMMSpace& space, const PointSet& set);
/// inf over cross pairs; +inf if either set is empty.
double set_distance(const FiniteMMSpace& space, const PointSet& a, const PointSet& b);
double set_diameter(const FiniteMMSpace& space, const PointSet& set);
/// d(x, A); +inf for empty A.
double point_set_distance(const FiniteMMSpace& space, std::size_t x, const PointSet& set);

PointSet closed_ball(const FiniteMMSpace& space, std::size_t center, double radius);
double ball_mass(const FiniteMMSpace& space, std::size_t center, double radius);

/// Maximal epsilon-separated subset (pairwise distance >= epsilon).
struct Net {
  PointSet members;
  double epsilon = 0.0;
  /// cover[i]: a member within distance < epsilon of i (i itself if member).
  std::vector<std::size_t> cover;
};

/// Greedy scan in seed_order (index order if empty). A point is admitted iff
/// its distance to every admitted point is >= epsilon.
Net build_net(const FiniteMMSpace& space, double epsilon,
              std::span<const std::size_t> seed_order = {});

/// Checks both net invariants from scratch.
bool is_valid_net(const FiniteMMSpace& space, const Net& net);

/// Number of net members inside closed_ball(center, radius).
std::size_t packing_multiplicity(const FiniteMMSpace& space, const Net& net,
                                 std::size_t center, double radius);

namespace reference {
/// Single-threaded triangle scan used to cross-check validate_space.
std::size_t count_triangle_violations(const RawSpace& raw);
}  // namespace reference

}  // namespace mmconc
