#include <algorithm>
#include <cmath>
#include <limits>

#include "mmconc/separation.hpp"

namespace mmconc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RealMeasure RealMeasure::from_pairs(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.position) || !std::isfinite(a.weight) || a.weight < 0.0) {
      throw InputError("real measure atoms need finite positions and finite weights >= 0");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.position < b.position; });
  RealMeasure nu;
  for (const auto& a : atoms) {
    if (a.weight == 0.0) continue;
    if (!nu.atoms_.empty() && nu.atoms_.back().position == a.position) {
      nu.atoms_.back().weight += a.weight;
    } else {
      nu.atoms_.push_back(a);
    }
  }
  for (const auto& a : nu.atoms_) nu.total_mass_ += a.weight;
  return nu;
}

RealMeasure RealMeasure::from_values(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw InputError("values and weights differ in length");
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) atoms.push_back({values[i], weights[i]});
  return from_pairs(std::move(atoms));
}

double RealMeasure::max_weight() const {
  double best = 0.0;
  for (const auto& a : atoms_) best = std::max(best, a.weight);
  return best;
}

FiniteMMSpace RealMeasure::as_space() const {
  const std::size_t n = atoms_.size();
  if (n == 0) throw InputError("empty real measure has no mm-space");
  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::to_string(i));
    weights.push_back(atoms_[i].weight);
    for (std::size_t j = 0; j < n; ++j) {
      dist[i * n + j] = std::abs(atoms_[i].position - atoms_[j].position);
    }
  }
  return FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(dist), std::move(weights));
}

QuantileGap sep_real_quantile(const RealMeasure& nu, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("quantile kappa must be > 0");
  const auto& atoms = nu.atoms();
  QuantileGap q;

  // nu((-inf, a)) is left-continuous in a; it first exceeds kappa just
  // after the atom that pushes the running mass above kappa.
  q.a0 = kInf;
  double below = 0.0;
  for (const auto& atom : atoms) {
    below += atom.weight;
    if (below > kappa) {
      q.a0 = atom.position;
      break;
    }
  }
  q.b0 = -kInf;
  double above = 0.0;
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    above += it->weight;
    if (above > kappa) {
      q.b0 = it->position;
      break;
    }
  }
  q.degenerate = q.b0 < q.a0;
  q.gap = q.degenerate ? 0.0 : q.b0 - q.a0;
  return q;
}

}  // namespace mmconc
