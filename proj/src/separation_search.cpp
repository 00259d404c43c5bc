#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "mmconc/parallel.hpp"
#include "mmconc/separation.hpp"

namespace mmconc {

namespace {

constexpr int kDiscarded = -1;
constexpr double kWalkProbability = 0.02;

// Local search for an admissible assignment at one threshold t: points at
// distance < t ("conflicts") may not sit in different groups.
class ThresholdSearch {
 public:
  ThresholdSearch(const FiniteMMSpace& space, const SepQuery& query, double threshold)
      : space_(space),
        kappas_(query.kappas()),
        groups_(query.groups()),
        n_(space.size()),
        conflicts_(n_),
        assign_(n_, kDiscarded),
        mass_(groups_, 0.0),
        count_(groups_, 0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j && space.distance(i, j) < threshold) conflicts_[i].push_back(j);
      }
    }
    empty_penalty_ = 1.0 + space.total_mass();
  }

  std::optional<std::vector<PointSet>> run(const SearchEffort& effort, std::mt19937_64& rng) {
    seed_components();
    if (auto w = admissible()) return w;

    double current = penalty();
    double best = current;
    std::size_t since_best = 0;
    std::uniform_int_distribution<std::size_t> pick_point(0, n_ - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<std::size_t, int>> undo_log;

    for (std::size_t move = 0; move < effort.moves; ++move) {
      if (since_best >= effort.restart_after) {
        restart(rng);
        current = penalty();
        best = current;
        since_best = 0;
      }
      const std::size_t p = pick_point(rng);
      const int target = pick_target(rng, coin);
      if (target == assign_[p]) continue;

      undo_log.clear();
      relocate(p, target, undo_log);
      if (target != kDiscarded) {
        for (std::size_t q : conflicts_[p]) {
          if (assign_[q] != kDiscarded && assign_[q] != target) relocate(q, kDiscarded, undo_log);
        }
      }
      const double next = penalty();
      if (next <= current || coin(rng) < kWalkProbability) {
        current = next;
        if (current < best) {
          best = current;
          since_best = 0;
        } else {
          ++since_best;
        }
        if (current <= 0.0) {
          if (auto w = admissible()) return w;
        }
      } else {
        for (auto it = undo_log.rbegin(); it != undo_log.rend(); ++it) relocate(it->first, it->second, nullptr);
        ++since_best;
      }
    }
    return admissible();
  }

 private:
  void relocate(std::size_t p, int target, std::vector<std::pair<std::size_t, int>>* log) {
    const int from = assign_[p];
    if (from == target) return;
    if (log) log->emplace_back(p, from);
    if (from != kDiscarded) {
      mass_[static_cast<std::size_t>(from)] -= space_.weight(p);
      --count_[static_cast<std::size_t>(from)];
    }
    if (target != kDiscarded) {
      mass_[static_cast<std::size_t>(target)] += space_.weight(p);
      ++count_[static_cast<std::size_t>(target)];
    }
    assign_[p] = target;
  }
  void relocate(std::size_t p, int target, std::vector<std::pair<std::size_t, int>>& log) {
    relocate(p, target, &log);
  }

  double penalty() const {
    double total = 0.0;
    for (std::size_t g = 0; g < groups_; ++g) {
      if (count_[g] == 0) total += empty_penalty_;
      total += std::max(0.0, kappas_[g] - mass_[g]);
    }
    return total;
  }

  int pick_target(std::mt19937_64& rng, std::uniform_real_distribution<double>& coin) {
    if (coin(rng) < 0.5) {
      // Prefer a group still short of its mass.
      std::vector<int> needy;
      for (std::size_t g = 0; g < groups_; ++g) {
        if (count_[g] == 0 || mass_[g] < kappas_[g]) needy.push_back(static_cast<int>(g));
      }
      if (!needy.empty()) {
        return needy[std::uniform_int_distribution<std::size_t>(0, needy.size() - 1)(rng)];
      }
    }
    const auto choice = std::uniform_int_distribution<std::size_t>(0, groups_)(rng);
    return choice == groups_ ? kDiscarded : static_cast<int>(choice);
  }

  // Whole conflict components never clash with each other; assign them
  // greedily (heaviest first) to the group with the largest deficit.
  void seed_components() {
    std::vector<int> comp(n_, -1);
    std::vector<std::vector<std::size_t>> components;
    for (std::size_t s = 0; s < n_; ++s) {
      if (comp[s] >= 0) continue;
      components.emplace_back();
      auto& members = components.back();
      comp[s] = static_cast<int>(components.size() - 1);
      members.push_back(s);
      for (std::size_t head = 0; head < members.size(); ++head) {
        for (std::size_t q : conflicts_[members[head]]) {
          if (comp[q] < 0) {
            comp[q] = comp[s];
            members.push_back(q);
          }
        }
      }
    }
    std::vector<double> cmass(components.size(), 0.0);
    for (std::size_t c = 0; c < components.size(); ++c) {
      for (std::size_t p : components[c]) cmass[c] += space_.weight(p);
    }
    std::vector<std::size_t> order(components.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cmass[a] > cmass[b]; });
    for (std::size_t c : order) {
      std::size_t target = groups_;
      double worst = 0.0;
      for (std::size_t g = 0; g < groups_; ++g) {
        const double need = count_[g] == 0 ? empty_penalty_ + kappas_[g] : kappas_[g] - mass_[g];
        if (need > worst) {
          worst = need;
          target = g;
        }
      }
      if (target == groups_) break;
      for (std::size_t p : components[c]) relocate(p, static_cast<int>(target), nullptr);
    }
  }

  void restart(std::mt19937_64& rng) {
    for (std::size_t p = 0; p < n_; ++p) relocate(p, kDiscarded, nullptr);
    std::fill(mass_.begin(), mass_.end(), 0.0);
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<std::size_t> group(0, groups_ - 1);
    for (std::size_t p : order) {
      const int g = static_cast<int>(group(rng));
      bool clash = false;
      for (std::size_t q : conflicts_[p]) clash = clash || (assign_[q] != kDiscarded && assign_[q] != g);
      if (!clash) relocate(p, g, nullptr);
    }
  }

  // Exact re-check in index order; the incremental masses only guide moves.
  std::optional<std::vector<PointSet>> admissible() const {
    std::vector<std::vector<std::size_t>> sets(groups_);
    for (std::size_t p = 0; p < n_; ++p) {
      if (assign_[p] != kDiscarded) sets[static_cast<std::size_t>(assign_[p])].push_back(p);
    }
    for (std::size_t p = 0; p < n_; ++p) {
      if (assign_[p] == kDiscarded) continue;
      for (std::size_t q : conflicts_[p]) {
        if (assign_[q] != kDiscarded && assign_[q] != assign_[p]) return std::nullopt;
      }
    }
    std::vector<PointSet> out;
    for (std::size_t g = 0; g < groups_; ++g) {
      double m = 0.0;
      for (std::size_t p : sets[g]) m += space_.weight(p);
      if (sets[g].empty() || !(m >= kappas_[g])) return std::nullopt;
      out.emplace_back(std::move(sets[g]), n_);
    }
    return out;
  }

  const FiniteMMSpace& space_;
  const std::vector<double>& kappas_;
  std::size_t groups_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> conflicts_;
  std::vector<int> assign_;
  std::vector<double> mass_;
  std::vector<std::size_t> count_;
  double empty_penalty_ = 1.0;
};

}  // namespace

SepResult sep_lower_bound(const FiniteMMSpace& space, const SepQuery& query,
                          const SearchEffort& effort, std::uint64_t seed) {
  SepResult best;
  if (space.size() < query.groups()) return best;
  const auto& thresholds = space.distinct_distances();
  if (thresholds.empty()) return best;

  // Feasibility at t is monotone (fewer conflicts at smaller t), so binary
  // search; a configuration found at t may certify a value above t.
  std::size_t lo = 0;
  std::size_t hi = thresholds.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ThresholdSearch search(space, query, thresholds[mid]);
    auto rng = stream_rng(seed, mid, 0x5e9);
    auto found = search.run(effort, rng);
    const double value = found ? verify_witnesses(space, query, *found) : -1.0;
    if (value >= thresholds[mid]) {
      if (!best.feasible || value > best.value) {
        best.feasible = true;
        best.value = value;
        best.witnesses = std::move(*found);
      }
      lo = static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), value) -
                                    thresholds.begin());
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace mmconc
