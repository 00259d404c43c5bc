#pragma once

// Space documents (JSON), real-measure documents and report emission.
// This is the only part of the library that reads or writes files.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmconc/families.hpp"
#include "mmconc/separation.hpp"
#include "mmconc/space.hpp"

namespace mmconc {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// A parsed space document before validation.
struct SpaceDocument {
  RawSpace raw;
  /// Set for generator metrics, which are metric by construction and skip
  /// the cubic triangle pass in parse_space.
  std::optional<FiniteMMSpace> generated;
  bool merge_duplicates = false;
  /// Optional "screen" object, kept verbatim.
  Json screen;
};

/// Schema errors name the offending field as a JSON pointer, e.g.
/// "/metric/matrix/2/1: expected a number". Syntax errors carry line and
/// column.
SpaceDocument parse_space_document(const std::string& text, const std::string& source = "<input>");
/// Validated (and merged, when the document asks for it) space.
FiniteMMSpace parse_space(const std::string& text, const std::string& source = "<input>");
FiniteMMSpace load_space(const std::string& path);
/// Explicit-matrix document; parse_space(serialize_space(x)) == x.
std::string serialize_space(const FiniteMMSpace& space);

/// {"atoms": [[position, weight], ...]} or [{"position": p, "weight": w}, ...].
RealMeasure parse_real_measure(const std::string& text, const std::string& source = "<input>");
/// True when the document carries "atoms" rather than a metric.
bool is_real_measure_document(const std::string& text);

std::string read_text_file(const std::string& path);

/// Finite doubles as JSON numbers, infinities as the strings "inf"/"-inf".
Json number(double value);
/// The exact text a number occupies in JSON output, without quotes.
std::string format_number(double value);
Json labels_of(const FiniteMMSpace& space, const PointSet& set);

/// Report body for the concentration experiment.
Json levy_report_json(const LevyReport& report);
/// One row per (member, screen, kappa) cell.
std::string levy_report_csv(const LevyReport& report);

/// Rows of scalars rendered as CSV. Strings are quoted when needed; numbers
/// use format_number so CSV and JSON agree digit for digit.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<Json>>& rows);

}  // namespace mmconc
