#include "mmconc/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "mmconc/parallel.hpp"

namespace mmconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool triangle_violated(double ik, double ij, double jk) {
  const double bound = ij + jk;
  return ik > bound + kTriangleSlack * bound;
}

}  // namespace

void set_worker_count(int workers) { omp_set_num_threads(std::max(1, workers)); }

int worker_count() { return omp_get_max_threads(); }

// ---------------------------------------------------------------------------
// PointSet

PointSet::PointSet(std::vector<std::size_t> indices, std::size_t universe)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (!indices_.empty() && indices_.back() >= universe) {
    throw InputError("point index " + std::to_string(indices_.back()) +
                     " out of range for a space of size " + std::to_string(universe));
  }
}

PointSet PointSet::all(std::size_t universe) {
  std::vector<std::size_t> idx(universe);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return PointSet(std::move(idx), universe);
}

PointSet PointSet::single(std::size_t index, std::size_t universe) {
  return PointSet({index}, universe);
}

bool PointSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

// ---------------------------------------------------------------------------
// FiniteMMSpace

struct SpaceBuilder {
  static FiniteMMSpace make(std::vector<std::string> labels, std::vector<double> dist,
                            std::vector<double> weights) {
    FiniteMMSpace s;
    s.labels_ = std::move(labels);
    s.dist_ = std::move(dist);
    s.weights_ = std::move(weights);
    s.finalize();
    return s;
  }
};

void FiniteMMSpace::finalize() {
  total_mass_ = 0.0;
  for (double w : weights_) total_mass_ += w;
  diameter_ = 0.0;
  distinct_.clear();
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      distinct_.push_back(dist_[i * n + j]);
    }
  }
  std::sort(distinct_.begin(), distinct_.end());
  distinct_.erase(std::unique(distinct_.begin(), distinct_.end()), distinct_.end());
  if (!distinct_.empty()) diameter_ = distinct_.back();
}

FiniteMMSpace FiniteMMSpace::with_weights(std::vector<double> weights) const {
  if (weights.size() != size()) throw InputError("weight vector has wrong length");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and >= 0");
  }
  FiniteMMSpace s = *this;
  s.weights_ = std::move(weights);
  s.total_mass_ = 0.0;
  for (double w : s.weights_) s.total_mass_ += w;
  return s;
}

FiniteMMSpace FiniteMMSpace::subspace(const PointSet& points) const {
  const std::size_t k = points.size();
  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<double> dist(k * k);
  labels.reserve(k);
  weights.reserve(k);
  const auto& idx = points.indices();
  for (std::size_t a = 0; a < k; ++a) {
    labels.push_back(labels_[idx[a]]);
    weights.push_back(weights_[idx[a]]);
    for (std::size_t b = 0; b < k; ++b) dist[a * k + b] = distance(idx[a], idx[b]);
  }
  return SpaceBuilder::make(std::move(labels), std::move(dist), std::move(weights));
}

RawSpace FiniteMMSpace::to_raw() const {
  RawSpace raw;
  raw.labels = labels_;
  raw.weights = weights_;
  raw.allow_zero_mass = total_mass_ == 0.0;
  const std::size_t n = size();
  raw.dist.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) raw.dist[i][j] = distance(i, j);
  }
  return raw;
}

FiniteMMSpace FiniteMMSpace::from_metric_unchecked(std::vector<std::string> labels,
                                                   std::vector<double> flat_dist,
                                                   std::vector<double> weights,
                                                   bool allow_zero_mass) {
  const std::size_t n = weights.size();
  if (n == 0 || labels.size() != n || flat_dist.size() != n * n) {
    throw InputError("generated space has inconsistent dimensions");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw InputError("generated space has a negative or non-finite weight");
    }
    m += weights[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double d = flat_dist[i * n + j];
      const bool bad = !std::isfinite(d) || d != flat_dist[j * n + i] ||
                       (i == j ? d != 0.0 : !(d > 0.0));
      if (bad) throw InputError("generated distance matrix is not a metric");
    }
  }
  if (m == 0.0 && !allow_zero_mass) throw InputError("generated space has zero mass");
  return SpaceBuilder::make(std::move(labels), std::move(flat_dist), std::move(weights));
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kShape: return "shape";
    case ViolationKind::kNonFinite: return "non_finite";
    case ViolationKind::kAsymmetry: return "asymmetry";
    case ViolationKind::kNonzeroDiagonal: return "nonzero_diagonal";
    case ViolationKind::kNegativeDistance: return "negative_distance";
    case ViolationKind::kZeroDistance: return "zero_distance";
    case ViolationKind::kTriangle: return "triangle";
    case ViolationKind::kNegativeWeight: return "negative_weight";
    case ViolationKind::kZeroMass: return "zero_mass";
  }
  return "unknown";
}

std::string Violation::describe(std::span<const std::string> labels) const {
  auto name = [&](std::size_t idx) {
    if (idx < labels.size()) return labels[idx];
    return std::to_string(idx);
  };
  std::ostringstream out;
  out << to_string(kind);
  if (i != npos) {
    out << " at (" << name(i);
    if (j != npos) out << ", " << name(j);
    if (k != npos) out << ", " << name(k);
    out << ")";
  }
  out << ": " << value;
  return out.str();
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary(std::span<const std::string> labels) const {
  std::ostringstream out;
  for (const auto& v : violations) out << v.describe(labels) << "\n";
  if (triangle_total > 0) out << "triangle violations in total: " << triangle_total << "\n";
  return out.str();
}

namespace {

class ReportSink {
 public:
  explicit ReportSink(ValidationReport& report) : report_(report) {}

  void add(Violation v) {
    auto& count = counts_[static_cast<std::size_t>(v.kind)];
    if (count++ < ValidationReport::kMaxPerKind) report_.violations.push_back(v);
  }

 private:
  ValidationReport& report_;
  std::size_t counts_[16] = {};
};

}  // namespace

ValidationResult validate_space(const RawSpace& raw) {
  ValidationResult result;
  ReportSink sink(result.report);
  const std::size_t n = raw.weights.size();

  bool rectangular = n > 0 && raw.dist.size() == n && raw.labels.size() == n;
  if (n == 0) sink.add({ViolationKind::kShape, Violation::npos, Violation::npos, Violation::npos, 0.0});
  if (raw.labels.size() != n) {
    sink.add({ViolationKind::kShape, Violation::npos, Violation::npos, Violation::npos,
              static_cast<double>(raw.labels.size())});
  }
  if (raw.dist.size() != n) {
    sink.add({ViolationKind::kShape, Violation::npos, Violation::npos, Violation::npos,
              static_cast<double>(raw.dist.size())});
  }
  for (std::size_t i = 0; i < raw.dist.size(); ++i) {
    if (raw.dist[i].size() != n) {
      rectangular = false;
      sink.add({ViolationKind::kShape, i, Violation::npos, Violation::npos,
                static_cast<double>(raw.dist[i].size())});
    }
  }

  bool finite = true;
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = raw.weights[i];
    if (!std::isfinite(w)) {
      finite = false;
      sink.add({ViolationKind::kNonFinite, i, Violation::npos, Violation::npos, w});
    } else if (w < 0.0) {
      sink.add({ViolationKind::kNegativeWeight, i, Violation::npos, Violation::npos, w});
    }
    m += w;
  }
  if (!rectangular) return result;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = raw.dist[i][j];
      if (!std::isfinite(d)) {
        finite = false;
        sink.add({ViolationKind::kNonFinite, i, j, Violation::npos, d});
        continue;
      }
      if (d < 0.0) sink.add({ViolationKind::kNegativeDistance, i, j, Violation::npos, d});
      if (i == j) {
        if (d != 0.0) sink.add({ViolationKind::kNonzeroDiagonal, i, i, Violation::npos, d});
        continue;
      }
      if (j > i) {
        if (d != raw.dist[j][i]) sink.add({ViolationKind::kAsymmetry, i, j, Violation::npos, d - raw.dist[j][i]});
        if (d == 0.0) sink.add({ViolationKind::kZeroDistance, i, j, Violation::npos, d});
      }
    }
  }
  if (!finite) return result;

  if (m <= 0.0 && !raw.allow_zero_mass) {
    sink.add({ViolationKind::kZeroMass, Violation::npos, Violation::npos, Violation::npos, m});
  }

  // Triangle pass: each worker scans rows i, results merged in i order so the
  // stored prefix of violations is schedule independent.
  std::vector<std::vector<Violation>> per_row(n);
  std::vector<std::size_t> per_row_count(n, 0);
  const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    auto& found = per_row[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double ij = raw.dist[i][j];
      for (std::size_t k = 0; k < n; ++k) {
        if (triangle_violated(raw.dist[i][k], ij, raw.dist[j][k])) {
          ++per_row_count[i];
          if (found.size() < ValidationReport::kMaxPerKind) {
            found.push_back({ViolationKind::kTriangle, i, j, k,
                             raw.dist[i][k] - (ij + raw.dist[j][k])});
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.report.triangle_total += per_row_count[i];
    for (const auto& v : per_row[i]) sink.add(v);
  }

  if (result.report.ok()) {
    std::vector<double> flat(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(raw.dist[i].begin(), raw.dist[i].end(), flat.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    result.space = SpaceBuilder::make(raw.labels, std::move(flat), raw.weights);
  }
  return result;
}

namespace {

std::string validation_message(const ValidationReport& report, std::span<const std::string> labels) {
  return "space violates the metric-measure axioms:\n" + report.summary(labels);
}

}  // namespace

ValidationError::ValidationError(ValidationReport report, std::vector<std::string> labels)
    : InputError(validation_message(report, labels)), report_(std::move(report)) {}

FiniteMMSpace make_space(const RawSpace& raw) {
  auto result = validate_space(raw);
  if (!result.space) throw ValidationError(std::move(result.report), raw.labels);
  return std::move(*result.space);
}

MergeResult merge_duplicates(const RawSpace& raw) {
  const std::size_t n = raw.weights.size();
  MergeResult out;
  std::vector<std::size_t> rep(n);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    rep[i] = i;
    for (std::size_t r : kept) {
      if (raw.dist[i][r] == 0.0) {
        rep[i] = r;
        break;
      }
    }
    if (rep[i] == i) kept.push_back(i);
  }
  std::vector<std::size_t> new_index(n);
  for (std::size_t a = 0; a < kept.size(); ++a) new_index[kept[a]] = a;
  out.groups.resize(kept.size());
  out.space.allow_zero_mass = raw.allow_zero_mass;
  out.space.labels.resize(kept.size());
  out.space.weights.assign(kept.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = new_index[rep[i]];
    out.groups[a].push_back(i);
    out.space.weights[a] += raw.weights[i];
    auto& label = out.space.labels[a];
    label = label.empty() ? raw.labels[i] : label + "+" + raw.labels[i];
  }
  out.space.dist.assign(kept.size(), std::vector<double>(kept.size()));
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t b = 0; b < kept.size(); ++b) out.space.dist[a][b] = raw.dist[kept[a]][kept[b]];
  }
  out.merged_count = n - kept.size();
  return out;
}

// ---------------------------------------------------------------------------
// Sets and balls

double set_mass(const FiniteMMSpace& space, const PointSet& set) {
  double m = 0.0;
  for (std::size_t i : set) m += space.weight(i);
  return m;
}

double set_distance(const FiniteMMSpace& space, const PointSet& a, const PointSet& b) {
  double best = kInf;
  for (std::size_t i : a) {
    for (std::size_t j : b) best = std::min(best, space.distance(i, j));
  }
  return best;
}

double set_diameter(const FiniteMMSpace& space, const PointSet& set) {
  double best = 0.0;
  const auto& idx = set.indices();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) best = std::max(best, space.distance(idx[a], idx[b]));
  }
  return best;
}

double point_set_distance(const FiniteMMSpace& space, std::size_t x, const PointSet& set) {
  double best = kInf;
  for (std::size_t j : set) best = std::min(best, space.distance(x, j));
  return best;
}

PointSet closed_ball(const FiniteMMSpace& space, std::size_t center, double radius) {
  if (center >= space.size()) throw InputError("ball center out of range");
  std::vector<std::size_t> idx;
  const auto row = space.row(center);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= radius) idx.push_back(j);
  }
  return PointSet(std::move(idx), space.size());
}

double ball_mass(const FiniteMMSpace& space, std::size_t center, double radius) {
  if (center >= space.size()) throw InputError("ball center out of range");
  double m = 0.0;
  const auto row = space.row(center);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= radius) m += space.weight(j);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Nets

Net build_net(const FiniteMMSpace& space, double epsilon, std::span<const std::size_t> seed_order) {
  if (!(epsilon > 0.0)) throw InputError("net scale epsilon must be > 0");
  const std::size_t n = space.size();
  std::vector<std::size_t> order;
  if (seed_order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    order.assign(seed_order.begin(), seed_order.end());
    std::vector<std::size_t> check = order;
    std::sort(check.begin(), check.end());
    bool perm = check.size() == n;
    for (std::size_t i = 0; perm && i < n; ++i) perm = check[i] == i;
    if (!perm) throw InputError("seed order is not a permutation of the points");
  }

  Net net;
  net.epsilon = epsilon;
  net.cover.assign(n, 0);
  std::vector<std::size_t> admitted;
  for (std::size_t p : order) {
    bool separated = true;
    for (std::size_t q : admitted) {
      if (space.distance(p, q) < epsilon) {
        separated = false;
        net.cover[p] = q;
        break;
      }
    }
    if (separated) {
      admitted.push_back(p);
      net.cover[p] = p;
    }
  }
  net.members = PointSet(std::move(admitted), n);
  return net;
}

bool is_valid_net(const FiniteMMSpace& space, const Net& net) {
  const auto& m = net.members.indices();
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      if (space.distance(m[a], m[b]) < net.epsilon) return false;
    }
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (net.members.contains(i)) continue;
    if (!(point_set_distance(space, i, net.members) < net.epsilon)) return false;
  }
  return !m.empty();
}

std::size_t packing_multiplicity(const FiniteMMSpace& space, const Net& net, std::size_t center,
                                 double radius) {
  if (!net.members.contains(center)) throw InputError("packing center is not a net member");
  std::size_t count = 0;
  for (std::size_t j : net.members) {
    if (space.distance(center, j) <= radius) ++count;
  }
  return count;
}

namespace reference {

std::size_t count_triangle_violations(const RawSpace& raw) {
  const std::size_t n = raw.weights.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (triangle_violated(raw.dist[i][k], raw.dist[i][j], raw.dist[j][k])) ++count;
      }
    }
  }
  return count;
}

}  // namespace reference

}  // namespace mmconc
