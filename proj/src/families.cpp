#include "mmconc/families.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "mmconc/io.hpp"

namespace mmconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> resolve_weights(const FamilySpec& spec, std::size_t points) {
  if (spec.weights.empty()) return std::vector<double>(points, 1.0 / static_cast<double>(points));
  if (spec.weights.size() != points) {
    throw InputError("family supplies " + std::to_string(spec.weights.size()) + " weights for " +
                     std::to_string(points) + " points");
  }
  return spec.weights;
}

void check_points(const FamilySpec& spec, std::size_t points) {
  if (points > spec.max_points) {
    throw BudgetExceeded(std::string(to_string(spec.kind)) + " would have " + std::to_string(points) +
                         " points, over the cap of " + std::to_string(spec.max_points));
  }
}

FiniteMMSpace hamming(const FamilySpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw InputError("hamming cube needs n >= 1");
  if (n > spec.max_cube_dimension) {
    throw BudgetExceeded("hamming cube n=" + std::to_string(n) + " exceeds the cap n <= " +
                         std::to_string(spec.max_cube_dimension));
  }
  const std::size_t points = std::size_t{1} << n;
  check_points(spec, points);
  const double scale = spec.normalize ? static_cast<double>(n) : 1.0;
  std::vector<std::string> labels(points);
  for (std::size_t i = 0; i < points; ++i) {
    labels[i].resize(n);
    for (std::size_t c = 0; c < n; ++c) labels[i][c] = (i >> c & 1) ? '1' : '0';
  }
  std::vector<double> dist(points * points);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      dist[i * points + j] = static_cast<double>(std::popcount(i ^ j)) / scale;
    }
  }
  return FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(dist), resolve_weights(spec, points));
}

FiniteMMSpace torus(const FamilySpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw InputError("discrete torus needs n >= 1");
  check_points(spec, n);
  const double scale = spec.normalize ? static_cast<double>(n) : 1.0;
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      dist[i * n + j] = static_cast<double>(std::min(gap, n - gap)) / scale;
    }
  }
  return FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(dist), resolve_weights(spec, n));
}

FiniteMMSpace graph(const FamilySpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw InputError("weighted graph needs n >= 1");
  check_points(spec, n);
  std::vector<double> dist(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0.0;
  for (const auto& e : spec.edges) {
    if (e.a >= n || e.b >= n) throw InputError("graph edge endpoint out of range");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) throw InputError("graph edge lengths must be finite and > 0");
    if (e.a == e.b) continue;
    dist[e.a * n + e.b] = std::min(dist[e.a * n + e.b], e.length);
    dist[e.b * n + e.a] = std::min(dist[e.b * n + e.a], e.length);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        dist[i * n + j] = std::min(dist[i * n + j], dist[i * n + k] + dist[k * n + j]);
      }
    }
  }
  double diameter = 0.0;
  for (double d : dist) {
    if (!std::isfinite(d)) throw InputError("weighted graph is disconnected");
    diameter = std::max(diameter, d);
  }
  if (spec.normalize && diameter > 0.0) {
    for (double& d : dist) d /= diameter;
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(dist), resolve_weights(spec, n));
}

FiniteMMSpace product(const FamilySpec& spec) {
  if (spec.factors.empty()) throw InputError("product needs at least one factor");
  FiniteMMSpace acc = generate(spec.factors.front());
  for (std::size_t f = 1; f < spec.factors.size(); ++f) {
    const FiniteMMSpace next = generate(spec.factors[f]);
    const std::size_t a = acc.size();
    const std::size_t b = next.size();
    check_points(spec, a * b);
    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(a * b);
    weights.reserve(a * b);
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        labels.push_back(acc.label(i) + "," + next.label(j));
        weights.push_back(acc.weight(i) * next.weight(j));
      }
    }
    std::vector<double> dist(a * b * a * b);
    for (std::size_t p = 0; p < a * b; ++p) {
      for (std::size_t q = 0; q < a * b; ++q) {
        dist[p * a * b + q] = acc.distance(p / b, q / b) + next.distance(p % b, q % b);
      }
    }
    acc = FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(dist), std::move(weights));
  }
  if (!spec.weights.empty()) acc = acc.with_weights(resolve_weights(spec, acc.size()));
  return acc;
}

std::size_t parse_size(const std::string& text, const std::string& whole) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError("bad size '" + text + "' in family '" + whole + "'");
  return value;
}

}  // namespace

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::hamming_cube: return "hamming_cube";
    case FamilyKind::discrete_torus: return "discrete_torus";
    case FamilyKind::weighted_graph: return "weighted_graph";
    case FamilyKind::product: return "product";
    case FamilyKind::custom_file: return "custom_file";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& name) {
  if (name == "hamming_cube" || name == "hamming" || name == "cube") return FamilyKind::hamming_cube;
  if (name == "discrete_torus" || name == "torus") return FamilyKind::discrete_torus;
  if (name == "weighted_graph" || name == "graph") return FamilyKind::weighted_graph;
  if (name == "product") return FamilyKind::product;
  if (name == "custom_file" || name == "file") return FamilyKind::custom_file;
  throw InputError("unknown family kind '" + name + "'");
}

FamilySpec FamilySpec::hamming_cube(std::size_t n) {
  FamilySpec spec;
  spec.kind = FamilyKind::hamming_cube;
  spec.n = n;
  return spec;
}

FamilySpec FamilySpec::discrete_torus(std::size_t n) {
  FamilySpec spec;
  spec.kind = FamilyKind::discrete_torus;
  spec.n = n;
  return spec;
}

FiniteMMSpace generate(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::hamming_cube: return hamming(spec);
    case FamilyKind::discrete_torus: return torus(spec);
    case FamilyKind::weighted_graph: return graph(spec);
    case FamilyKind::product: return product(spec);
    case FamilyKind::custom_file: return load_space(spec.path);
  }
  throw InputError("unknown family kind");
}

std::vector<FamilySpec> parse_family_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("family must look like kind:n or kind:lo..hi, got '" + text + "'");
  const FamilyKind kind = parse_family_kind(text.substr(0, colon));
  if (kind != FamilyKind::hamming_cube && kind != FamilyKind::discrete_torus) {
    throw InputError("family ranges support hamming and torus only");
  }
  const std::string sizes = text.substr(colon + 1);
  const auto dots = sizes.find("..");
  const std::size_t lo = parse_size(sizes.substr(0, dots), text);
  const std::size_t hi = dots == std::string::npos ? lo : parse_size(sizes.substr(dots + 2), text);
  if (lo == 0 || hi < lo) throw InputError("empty family range '" + text + "'");
  std::vector<FamilySpec> out;
  for (std::size_t n = lo; n <= hi; ++n) {
    FamilySpec spec;
    spec.kind = kind;
    spec.n = n;
    out.push_back(spec);
  }
  return out;
}

std::string family_label(const FamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::hamming_cube:
    case FamilyKind::discrete_torus:
    case FamilyKind::weighted_graph:
      return std::string(to_string(spec.kind)) + "(" + std::to_string(spec.n) + ")";
    case FamilyKind::product: {
      std::string label = "product(";
      for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        if (f) label += ",";
        label += family_label(spec.factors[f]);
      }
      return label + ")";
    }
    case FamilyKind::custom_file: return "custom_file(" + spec.path + ")";
  }
  return "unknown";
}

RealMap coordinate_mean_map(const FiniteMMSpace& cube) {
  RealMap f;
  f.values.reserve(cube.size());
  const std::size_t n = cube.size() == 0 ? 0 : cube.label(0).size();
  if (n == 0 || cube.size() != (std::size_t{1} << n)) throw InputError("not a generated hamming cube");
  for (const auto& label : cube.labels()) {
    if (label.size() != n || label.find_first_not_of("01") != std::string::npos) {
      throw InputError("cube label '" + label + "' is not a bit string of length " + std::to_string(n));
    }
    f.values.push_back(static_cast<double>(std::count(label.begin(), label.end(), '1')) / static_cast<double>(n));
  }
  return f;
}

RealMeasure binomial_mean_measure(std::size_t n) {
  if (n == 0 || n > 52) throw InputError("binomial mean measure needs 1 <= n <= 52");
  std::vector<RealMeasure::Atom> atoms;
  std::uint64_t choose = 1;
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  for (std::size_t k = 0; k <= n; ++k) {
    atoms.push_back({static_cast<double>(k) / static_cast<double>(n), static_cast<double>(choose) * scale});
    choose = choose * (n - k) / (k + 1);
  }
  return RealMeasure::from_pairs(std::move(atoms));
}

std::vector<RosterScreen> default_roster() {
  std::vector<RosterScreen> roster;
  roster.push_back({"torus8", generate(FamilySpec::discrete_torus(8))});

  const double s = 0.5;
  const double diag = std::sqrt(2.0) * s;
  // Corners in cyclic order.
  std::vector<double> square{0, s, diag, s, s, 0, s, diag, diag, s, 0, s, s, diag, s, 0};
  roster.push_back({"square", FiniteMMSpace::from_metric_unchecked({"00", "10", "11", "01"}, std::move(square),
                                                                   {0.25, 0.25, 0.25, 0.25})});
  roster.push_back({"point", FiniteMMSpace::from_metric_unchecked({"p"}, {0.0}, {1.0})});
  return roster;
}

}  // namespace mmconc
