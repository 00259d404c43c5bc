#pragma once

// Generators for standard mm-space sequences and the concentration
// experiment that runs a sequence against a finite roster of screens.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmconc/doubling.hpp"
#include "mmconc/observable.hpp"
#include "mmconc/separation.hpp"
#include "mmconc/space.hpp"

namespace mmconc {

enum class FamilyKind { hamming_cube, discrete_torus, weighted_graph, product, custom_file };

const char* to_string(FamilyKind kind);
/// Accepts the names printed by to_string plus the short forms
/// "hamming", "cube", "torus", "graph", "file".
FamilyKind parse_family_kind(const std::string& name);

struct WeightedEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 1.0;
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::hamming_cube;
  /// Cube dimension, torus length or graph vertex count. Unused by
  /// product and custom_file.
  std::size_t n = 1;
  /// Hamming distance / n, arc length / n, graph distance / graph diameter.
  bool normalize = true;
  /// Empty means uniform weights summing to 1.
  std::vector<double> weights;
  std::vector<WeightedEdge> edges;
  std::vector<FamilySpec> factors;
  std::string path;
  std::size_t max_cube_dimension = 12;
  std::size_t max_points = 4096;

  static FamilySpec hamming_cube(std::size_t n);
  static FamilySpec discrete_torus(std::size_t n);
};

/// Deterministic construction. Throws BudgetExceeded over the size caps and
/// InputError on malformed specs (disconnected graph, weight count mismatch).
FiniteMMSpace generate(const FamilySpec& spec);

/// "hamming:2..8", "torus:16", "cube:3..5". Only sized kinds are accepted.
std::vector<FamilySpec> parse_family_range(const std::string& text);
/// "hamming_cube(3)" style label used in reports.
std::string family_label(const FamilySpec& spec);

/// f(x) = (number of 1 coordinates) / n on a generated normalized cube,
/// read from its bit-string labels.
RealMap coordinate_mean_map(const FiniteMMSpace& cube);
/// Pushforward of the uniform cube measure by the coordinate mean: atoms k/n
/// with weights C(n, k) / 2^n. Exact in double for n <= 52.
RealMeasure binomial_mean_measure(std::size_t n);

struct RosterScreen {
  std::string name;
  FiniteMMSpace space;
};

/// Z_8 with step 1/8, the Euclidean square of side 1/2, and a single point.
std::vector<RosterScreen> default_roster();

struct LevyOptions {
  std::vector<double> kappas{0.1};
  SearchEffort sep_effort{};
  SepBudget sep_budget{};
  ScreenSampling sampling{};
  /// Horizon R of the doubling profiles; defaults to the largest screen
  /// diameter in the roster.
  std::optional<double> horizon;
  /// Net scale for the concentration witness; defaults to 3 R / 32.
  std::optional<double> epsilon;
  /// Witness mass floor as a fraction of the source mass.
  double mass_floor_fraction = 1.0 / 6.0;
  std::uint64_t seed = 0;
};

struct RosterEntry {
  std::string name;
  std::size_t points = 0;
  std::vector<std::string> labels;
  double diameter = 0.0;
  std::optional<DoublingProfile> profile;
  /// Empty when the profile was computed; otherwise the refusal reason.
  std::string status;
};

struct SepCell {
  double kappa = 0.0;
  SepResult lower;
  std::optional<SepResult> exact;
};

struct ScreenCell {
  std::string screen;
  double kappa = 0.0;
  bool ok = false;
  std::string error;
  Bracket bracket;
  std::size_t starved = 0;
  std::optional<ConcentrationWitness> witness;
};

struct LevyRow {
  std::string family;
  std::size_t n = 0;
  std::size_t points = 0;
  std::vector<std::string> labels;
  double mass = 0.0;
  std::vector<SepCell> sep;
  /// Screen-major, kappa-minor.
  std::vector<ScreenCell> cells;
  /// Per kappa: max over roster screens of the obsdiam lower bound.
  std::vector<double> roster_sup;
};

struct LevyReport {
  std::vector<double> kappas;
  double horizon = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<RosterEntry> roster;
  /// Pointwise max of the computed screen profiles: the common C on (0, R].
  std::optional<DoublingProfile> envelope;
  std::vector<LevyRow> rows;
};

/// Per-member sizes come from each spec; screen failures are recorded in
/// their cells rather than thrown.
LevyReport run_levy_experiment(const std::vector<FamilySpec>& family, const std::vector<RosterScreen>& roster,
                               const LevyOptions& options);

}  // namespace mmconc
