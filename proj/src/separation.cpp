#include "mmconc/separation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace mmconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass pruning only discards branches that are infeasible by a clear margin;
// borderline branches are left to the exact check at the leaves.
constexpr double kPruneSlack = 1e-9;

using Assignment = std::vector<std::uint8_t>;

struct Candidate {
  double value = -1.0;  // < 0: nothing admissible found
  Assignment assignment;
};

std::vector<PointSet> witnesses_from(const Assignment& a, std::size_t groups) {
  std::vector<std::vector<std::size_t>> sets(groups);
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a[p] > 0) sets[a[p] - 1].push_back(p);
  }
  std::vector<PointSet> out;
  out.reserve(groups);
  for (auto& s : sets) out.emplace_back(std::move(s), a.size());
  return out;
}

SepResult to_result(const Candidate& best, std::size_t groups, bool exact) {
  SepResult r;
  r.exact = exact;
  if (best.value >= 0.0) {
    r.feasible = true;
    r.value = best.value;
    r.witnesses = witnesses_from(best.assignment, groups);
  }
  return r;
}

void raise_to(std::atomic<double>& target, double value) {
  double cur = target.load(std::memory_order_relaxed);
  while (cur < value && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

// Depth-first branch and bound over assignments in lexicographic order.
class ExactSearch {
 public:
  ExactSearch(const FiniteMMSpace& space, const SepQuery& query, std::atomic<double>& global)
      : space_(space),
        kappas_(query.kappas()),
        groups_(query.groups()),
        n_(space.size()),
        global_(global),
        suffix_mass_(n_ + 1, 0.0),
        mass_(groups_, 0.0),
        members_(groups_),
        assignment_(n_, 0) {
    for (std::size_t p = n_; p-- > 0;) suffix_mass_[p] = suffix_mass_[p + 1] + space.weight(p);
    slack_ = kPruneSlack * (1.0 + space.total_mass());
  }

  // Replays a fixed prefix, then searches below it. Returns the local best.
  Candidate run(std::span<const std::uint8_t> prefix) {
    best_ = Candidate{};
    double curmin = kInf;
    std::size_t applied = 0;
    while (applied < prefix.size() && apply(applied, prefix[applied], curmin)) ++applied;
    if (applied == prefix.size()) descend(applied, curmin);
    while (applied-- > 0) undo(applied);
    return best_;
  }

 private:
  // Assigns point p; returns false if the branch is pruned (state untouched).
  bool apply(std::size_t p, std::uint8_t digit, double& curmin) {
    double next = curmin;
    if (digit > 0) {
      const std::size_t g = digit - 1;
      for (std::size_t h = 0; h < groups_; ++h) {
        if (h == g) continue;
        for (std::size_t q : members_[h]) next = std::min(next, space_.distance(p, q));
      }
      if (next < global_.load(std::memory_order_relaxed)) return false;
      if (best_.value >= 0.0 && next <= best_.value) return false;
    }
    assignment_[p] = digit;
    if (digit > 0) {
      mass_[digit - 1] += space_.weight(p);
      members_[digit - 1].push_back(p);
    }
    if (!completable(p + 1)) {
      undo(p);
      return false;
    }
    curmin = next;
    return true;
  }

  void undo(std::size_t p) {
    const std::uint8_t digit = assignment_[p];
    if (digit > 0) {
      mass_[digit - 1] -= space_.weight(p);
      members_[digit - 1].pop_back();
    }
    assignment_[p] = 0;
  }

  bool completable(std::size_t next) const {
    const double rest = suffix_mass_[next];
    std::size_t empty = 0;
    double deficit = 0.0;
    for (std::size_t g = 0; g < groups_; ++g) {
      if (members_[g].empty()) ++empty;
      const double need = kappas_[g] - mass_[g];
      if (need > 0.0) {
        if (need > rest + slack_) return false;
        deficit += need;
      }
    }
    if (empty > n_ - next) return false;
    return deficit <= rest + slack_;
  }

  void descend(std::size_t p, double curmin) {
    if (curmin < global_.load(std::memory_order_relaxed)) return;
    if (best_.value >= 0.0 && curmin <= best_.value) return;
    if (p == n_) {
      leaf(curmin);
      return;
    }
    for (std::uint8_t digit = 0; digit <= groups_; ++digit) {
      double next = curmin;
      if (!apply(p, digit, next)) continue;
      descend(p + 1, next);
      undo(p);
    }
  }

  void leaf(double curmin) {
    for (std::size_t g = 0; g < groups_; ++g) {
      if (members_[g].empty()) return;
      // Same index-order accumulation as set_mass.
      double m = 0.0;
      for (std::size_t q : members_[g]) m += space_.weight(q);
      if (!(m >= kappas_[g])) return;
    }
    if (curmin > best_.value) {
      best_.value = curmin;
      best_.assignment = assignment_;
      raise_to(global_, curmin);
    }
  }

  const FiniteMMSpace& space_;
  const std::vector<double>& kappas_;
  std::size_t groups_;
  std::size_t n_;
  std::atomic<double>& global_;
  std::vector<double> suffix_mass_;
  double slack_ = 0.0;
  std::vector<double> mass_;
  std::vector<std::vector<std::size_t>> members_;
  Assignment assignment_;
  Candidate best_;
};

}  // namespace

SepQuery::SepQuery(std::vector<double> kappas) : kappas_(std::move(kappas)) {
  if (kappas_.size() < 2) throw InputError("a separation query needs at least two kappas");
  if (kappas_.size() > 250) throw InputError("too many kappas in a separation query");
  for (double k : kappas_) {
    if (!std::isfinite(k) || k < 0.0) throw InputError("kappas must be finite and >= 0");
  }
}

std::uint64_t sep_assignment_count(std::size_t points, std::size_t groups) {
  const std::uint64_t base = groups + 1;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < points; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= base;
  }
  return total;
}

bool sep_exact_fits(const FiniteMMSpace& space, const SepQuery& query, const SepBudget& budget) {
  return sep_assignment_count(space.size(), query.groups()) <= budget.max_assignments;
}

SepResult sep_exact(const FiniteMMSpace& space, const SepQuery& query, const SepBudget& budget) {
  if (!sep_exact_fits(space, query, budget)) {
    throw BudgetExceeded("exhaustive separation search needs " +
                         std::to_string(query.groups() + 1) + "^" + std::to_string(space.size()) +
                         " assignments, over the budget of " +
                         std::to_string(budget.max_assignments));
  }
  const std::size_t n = space.size();
  const std::size_t base = query.groups() + 1;

  std::size_t prefix_len = 0;
  std::size_t tasks = 1;
  while (prefix_len < n && tasks < 256) {
    tasks *= base;
    ++prefix_len;
  }

  std::atomic<double> global{-1.0};
  std::vector<Candidate> local(tasks);
  const auto stasks = static_cast<std::int64_t>(tasks);
#pragma omp parallel
  {
    ExactSearch search(space, query, global);
    std::vector<std::uint8_t> prefix(prefix_len);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < stasks; ++t) {
      auto code = static_cast<std::size_t>(t);
      for (std::size_t pos = prefix_len; pos-- > 0;) {
        prefix[pos] = static_cast<std::uint8_t>(code % base);
        code /= base;
      }
      local[static_cast<std::size_t>(t)] = search.run(prefix);
    }
  }

  Candidate best;
  for (auto& c : local) {
    if (c.value > best.value) best = std::move(c);
  }
  return to_result(best, query.groups(), true);
}

double verify_witnesses(const FiniteMMSpace& space, const SepQuery& query,
                        std::span<const PointSet> witnesses) {
  if (witnesses.size() != query.groups()) return -1.0;
  std::vector<int> owner(space.size(), -1);
  for (std::size_t g = 0; g < witnesses.size(); ++g) {
    if (witnesses[g].empty()) return -1.0;
    for (std::size_t p : witnesses[g]) {
      if (p >= space.size() || owner[p] >= 0) return -1.0;
      owner[p] = static_cast<int>(g);
    }
    if (!(set_mass(space, witnesses[g]) >= query.kappas()[g])) return -1.0;
  }
  double value = kInf;
  for (std::size_t g = 0; g < witnesses.size(); ++g) {
    for (std::size_t h = g + 1; h < witnesses.size(); ++h) {
      value = std::min(value, set_distance(space, witnesses[g], witnesses[h]));
    }
  }
  return value;
}

namespace reference {

SepResult sep_exact_serial(const FiniteMMSpace& space, const SepQuery& query,
                           const SepBudget& budget) {
  if (!sep_exact_fits(space, query, budget)) throw BudgetExceeded("reference separation over budget");
  const std::size_t n = space.size();
  const std::size_t groups = query.groups();
  const auto& kappas = query.kappas();
  Assignment digits(n, 0);
  Candidate best;
  std::vector<double> mass(groups);
  std::vector<std::size_t> count(groups);
  while (true) {
    std::fill(mass.begin(), mass.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t p = 0; p < n; ++p) {
      if (digits[p] > 0) {
        mass[digits[p] - 1] += space.weight(p);
        ++count[digits[p] - 1];
      }
    }
    bool admissible = true;
    for (std::size_t g = 0; g < groups && admissible; ++g) {
      admissible = count[g] > 0 && mass[g] >= kappas[g];
    }
    if (admissible) {
      double value = kInf;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          if (digits[p] > 0 && digits[q] > 0 && digits[p] != digits[q]) {
            value = std::min(value, space.distance(p, q));
          }
        }
      }
      if (value > best.value) {
        best.value = value;
        best.assignment = digits;
      }
    }
    // Odometer: position n-1 is the least significant digit.
    std::size_t pos = n;
    for (;;) {
      if (pos == 0) return to_result(best, groups, true);
      --pos;
      if (digits[pos] < groups) {
        ++digits[pos];
        break;
      }
      digits[pos] = 0;
    }
  }
}

}  // namespace reference

}  // namespace mmconc
