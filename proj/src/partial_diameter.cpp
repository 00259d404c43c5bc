#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mmconc/observable.hpp"

namespace mmconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCliquePoints = 64;

// Decides whether some clique of the "distance <= D" graph on the support
// reaches the target mass. Vertices are taken in increasing index order, so
// clique masses accumulate in the same order as set_mass.
class CliqueSearch {
 public:
  CliqueSearch(std::vector<double> weights, std::vector<std::uint64_t> adjacency, double target)
      : weights_(std::move(weights)), adj_(std::move(adjacency)), target_(target) {}

  bool reachable() {
    const std::size_t k = weights_.size();
    const std::uint64_t all = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    return expand(0.0, all);
  }

 private:
  double mass_of(std::uint64_t set) const {
    double m = 0.0;
    while (set) {
      m += weights_[static_cast<std::size_t>(std::countr_zero(set))];
      set &= set - 1;
    }
    return m;
  }

  bool expand(double mass, std::uint64_t candidates) {
    if (mass >= target_) return true;
    // Bound with a little slack: only clearly hopeless branches are cut.
    const double room = mass_of(candidates);
    if (mass + room < target_ - 1e-12 * (1.0 + target_)) return false;
    while (candidates) {
      const auto v = static_cast<std::size_t>(std::countr_zero(candidates));
      candidates &= candidates - 1;
      if (expand(mass + weights_[v], candidates & adj_[v])) return true;
      if (mass + mass_of(candidates) < target_ - 1e-12 * (1.0 + target_)) return false;
    }
    return false;
  }

  std::vector<double> weights_;
  std::vector<std::uint64_t> adj_;
  double target_;
};

std::vector<std::size_t> support_of(const FiniteMMSpace& space) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.weight(i) > 0.0) support.push_back(i);
  }
  return support;
}

}  // namespace

double partial_diameter_real(const RealMeasure& nu, double target_mass) {
  if (target_mass <= 0.0) return 0.0;
  const auto& atoms = nu.atoms();
  const std::size_t n = atoms.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + atoms[i].weight;
  if (n == 0 || target_mass > prefix[n]) return kInf;
  if (target_mass <= nu.max_weight()) return 0.0;

  double best = kInf;
  std::size_t right = 0;
  for (std::size_t left = 0; left < n; ++left) {
    right = std::max(right, left);
    while (right < n && prefix[right + 1] - prefix[left] < target_mass) ++right;
    if (right == n) break;
    best = std::min(best, atoms[right].position - atoms[left].position);
  }
  return best;
}

double partial_diameter_screen(const FiniteMMSpace& weighted_screen, double target_mass,
                               const ScreenBudget& budget) {
  if (target_mass <= 0.0) return 0.0;
  if (target_mass > weighted_screen.total_mass()) return kInf;
  const auto support = support_of(weighted_screen);
  const std::size_t limit = std::min(budget.max_points, kMaxCliquePoints);
  if (support.size() > limit) {
    throw BudgetExceeded("screen support has " + std::to_string(support.size()) +
                         " points, over the subset-search budget of " + std::to_string(limit));
  }
  const std::size_t k = support.size();
  std::vector<double> weights(k);
  double heaviest = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    weights[a] = weighted_screen.weight(support[a]);
    heaviest = std::max(heaviest, weights[a]);
  }
  if (target_mass <= heaviest) return 0.0;

  std::vector<double> candidates;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) candidates.push_back(weighted_screen.distance(support[a], support[b]));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto feasible = [&](double diameter) {
    std::vector<std::uint64_t> adj(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        if (a != b && weighted_screen.distance(support[a], support[b]) <= diameter) {
          adj[a] |= std::uint64_t{1} << b;
        }
      }
    }
    return CliqueSearch(weights, std::move(adj), target_mass).reachable();
  };

  // Reachable mass only grows with the allowed diameter.
  std::size_t lo = 0;
  std::size_t hi = candidates.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  // The full support always qualifies unless rounding made its mass fall
  // short of a target equal to m.
  return lo < candidates.size() ? candidates[lo] : kInf;
}

double partial_diameter_ball_bound(const FiniteMMSpace& space, double target_mass) {
  if (target_mass <= 0.0) return 0.0;
  if (target_mass > space.total_mass()) return kInf;
  const std::size_t n = space.size();
  const bool exact_diameter = n <= 512;
  double best = kInf;
  std::vector<std::size_t> order(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = space.row(x);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    double mass = 0.0;
    std::size_t end = 0;
    while (end < n && mass < target_mass) mass += space.weight(order[end++]);
    if (mass < target_mass) continue;
    const double radius = row[order[end - 1]];
    while (end < n && row[order[end]] <= radius) ++end;
    double diameter = 2.0 * radius;
    if (exact_diameter) {
      diameter = 0.0;
      for (std::size_t a = 0; a < end; ++a) {
        for (std::size_t b = a + 1; b < end; ++b) diameter = std::max(diameter, space.distance(order[a], order[b]));
      }
    }
    best = std::min(best, diameter);
  }
  return best;
}

namespace reference {

double partial_diameter_screen_bruteforce(const FiniteMMSpace& weighted_screen, double target_mass) {
  if (target_mass <= 0.0) return 0.0;
  const auto support = support_of(weighted_screen);
  const std::size_t k = support.size();
  if (k > 24) throw BudgetExceeded("brute-force partial diameter limited to 24 support points");
  double best = kInf;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    double mass = 0.0;
    double diameter = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      if (!(mask >> a & 1)) continue;
      mass += weighted_screen.weight(support[a]);
      for (std::size_t b = a + 1; b < k; ++b) {
        if (mask >> b & 1) diameter = std::max(diameter, weighted_screen.distance(support[a], support[b]));
      }
    }
    if (mass >= target_mass) best = std::min(best, diameter);
  }
  return best;
}

}  // namespace reference

}  // namespace mmconc
