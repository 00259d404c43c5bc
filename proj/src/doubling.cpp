#include "mmconc/doubling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mmconc {

namespace {

// Radii within this relative distance above R are treated as R, so bounds
// like 2 * (16 eps / 3) <= R survive rounding once 32 eps <= 3 R holds.
constexpr double kHorizonSlack = 1e-12;

std::vector<double> grid_radii(const FiniteMMSpace& space, double horizon, const GridSpec& grid) {
  std::vector<double> radii{horizon};
  for (double d : space.distinct_distances()) {
    if (d <= horizon) radii.push_back(d);
    if (d / 2.0 <= horizon) radii.push_back(d / 2.0);
  }
  for (double r : grid.extra_radii) {
    if (r > 0.0 && r <= horizon) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  return radii;
}

void check_profile_input(const FiniteMMSpace& space, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("doubling horizon R must be > 0");
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!(space.weight(i) > 0.0)) {
      throw PreconditionError("point " + space.label(i) +
                              " has zero weight, so its small balls have mass 0");
    }
  }
}

double dyadic_max(const DoublingProfile& profile, double r1, double r2) {
  double c = 1.0;
  for (double r = r1; r <= 2.0 * r2; r *= 2.0) c = std::max(c, profile.at(r));
  return c;
}

void check_radii(const DoublingProfile& profile, double r1, double r2) {
  if (!(r1 > 0.0) || !(r1 <= r2)) throw PreconditionError("need 0 < r1 <= r2");
  if (!(2.0 * r2 <= profile.horizon())) throw PreconditionError("need 2 r2 <= R");
}

}  // namespace

DoublingProfile::DoublingProfile(double horizon, std::vector<double> radii, std::vector<double> constants)
    : horizon_(horizon), radii_(std::move(radii)), constants_(std::move(constants)) {
  if (radii_.size() != constants_.size()) throw InputError("profile radii and constants differ in length");
}

double DoublingProfile::at(double r) const {
  if (!(r > 0.0) || r > horizon_ * (1.0 + kHorizonSlack)) {
    throw PreconditionError("doubling constant requested outside (0, R]");
  }
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  if (it == radii_.begin()) return 1.0;
  return constants_[static_cast<std::size_t>(it - radii_.begin()) - 1];
}

double DoublingProfile::sup() const {
  double c = 1.0;
  for (double v : constants_) c = std::max(c, v);
  return c;
}

DoublingProfile doubling_profile(const FiniteMMSpace& space, double horizon, const GridSpec& grid) {
  check_profile_input(space, horizon);
  const auto radii = grid_radii(space, horizon, grid);
  const std::size_t n = space.size();
  const std::size_t g = radii.size();
  std::vector<double> constants(g, 1.0);
  const auto sn = static_cast<std::int64_t>(n);

#pragma omp parallel
  {
    std::vector<double> local(g, 1.0);
    std::vector<std::size_t> order(n);
    std::vector<double> sorted(n);
    std::vector<double> cumulative(n + 1);
#pragma omp for schedule(static)
    for (std::int64_t sx = 0; sx < sn; ++sx) {
      const auto x = static_cast<std::size_t>(sx);
      const auto row = space.row(x);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
      cumulative[0] = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        sorted[a] = row[order[a]];
        cumulative[a + 1] = cumulative[a] + space.weight(order[a]);
      }
      auto mass_within = [&](double r) {
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), r) - sorted.begin();
        return cumulative[static_cast<std::size_t>(count)];
      };
      for (std::size_t k = 0; k < g; ++k) {
        local[k] = std::max(local[k], mass_within(2.0 * radii[k]) / mass_within(radii[k]));
      }
    }
#pragma omp critical(doubling_profile_merge)
    for (std::size_t k = 0; k < g; ++k) constants[k] = std::max(constants[k], local[k]);
  }
  return DoublingProfile(horizon, radii, std::move(constants));
}

double DoublingFunction::operator()(double r) const {
  if (radii.empty()) throw InputError("empty doubling function table");
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  if (it == radii.begin()) return values.front();
  return values[static_cast<std::size_t>(it - radii.begin()) - 1];
}

bool satisfies(const DoublingProfile& profile, const DoublingFunction& c) {
  // Both sides are step functions; compare at every breakpoint of either.
  std::vector<double> points = profile.radii();
  for (double r : c.radii) {
    if (r > 0.0 && r <= profile.horizon()) points.push_back(r);
  }
  const double smallest = profile.radii().empty() ? profile.horizon() : profile.radii().front();
  points.push_back(smallest / 2.0);
  for (double r : points) {
    if (profile.at(r) > c(r)) return false;
  }
  return true;
}

DoublingProfile envelope(std::span<const DoublingProfile> profiles) {
  if (profiles.empty()) throw InputError("envelope of no profiles");
  const double horizon = profiles.front().horizon();
  std::vector<double> radii;
  for (const auto& p : profiles) {
    if (p.horizon() != horizon) throw InputError("envelope needs a common horizon R");
    radii.insert(radii.end(), p.radii().begin(), p.radii().end());
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  std::vector<double> constants(radii.size(), 1.0);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (const auto& p : profiles) constants[k] = std::max(constants[k], p.at(radii[k]));
  }
  return DoublingProfile(horizon, std::move(radii), std::move(constants));
}

double lemma_constant(const DoublingProfile& profile, double r1, double r2) {
  check_radii(profile, r1, r2);
  return dyadic_max(profile, r1, r2);
}

double ratio_bound(const DoublingProfile& profile, double r1, double r2) {
  const double c = lemma_constant(profile, r1, r2);
  return std::pow(r1 / r2, c / std::numbers::ln2) / (c * c);
}

PackingCheck packing_bound_check(const FiniteMMSpace& screen, const DoublingProfile& profile, const Net& net,
                                 double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("packing check needs eps > 0");
  if (!(32.0 * epsilon <= 3.0 * profile.horizon())) throw PreconditionError("packing check needs 32 eps <= 3 R");
  PackingCheck check;
  check.lemma_constant = dyadic_max(profile, epsilon / 3.0, 16.0 * epsilon / 3.0);
  const double c = check.lemma_constant;
  check.bound = std::exp2(4.0 * c) * c * c;
  for (std::size_t center : net.members) {
    check.max_multiplicity = std::max(check.max_multiplicity, packing_multiplicity(screen, net, center, 5.0 * epsilon));
  }
  check.holds = static_cast<double>(check.max_multiplicity) <= check.bound;
  return check;
}

Coloring color_net(const FiniteMMSpace& space, const Net& net, double epsilon) {
  const double radius = 5.0 * epsilon;
  const auto& members = net.members.indices();
  if (members.empty()) throw InputError("cannot color an empty net");
  Coloring coloring;
  for (std::size_t c : members) {
    const std::size_t k = packing_multiplicity(space, net, c, radius);
    if (k > coloring.k) {
      coloring.k = k;
      coloring.center = c;
    }
  }
  std::vector<std::size_t> seeds;
  for (std::size_t j : members) {
    if (space.distance(coloring.center, j) <= radius) seeds.push_back(j);
  }

  std::vector<bool> used(space.size(), false);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::vector<bool> barred(space.size(), false);
    for (std::size_t later = i + 1; later < seeds.size(); ++later) barred[seeds[later]] = true;
    std::vector<std::size_t> cls{seeds[i]};
    used[seeds[i]] = true;
    for (std::size_t p : members) {
      if (used[p] || barred[p]) continue;
      const bool separated = std::all_of(cls.begin(), cls.end(),
                                         [&](std::size_t q) { return space.distance(p, q) >= radius; });
      if (separated) {
        cls.push_back(p);
        used[p] = true;
      }
    }
    coloring.classes.emplace_back(std::move(cls), space.size());
  }
  return coloring;
}

bool is_valid_coloring(const FiniteMMSpace& space, const Net& net, const Coloring& coloring, double epsilon) {
  std::vector<int> seen(space.size(), 0);
  for (const auto& cls : coloring.classes) {
    const auto& idx = cls.indices();
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (!net.members.contains(idx[a])) return false;
      ++seen[idx[a]];
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (space.distance(idx[a], idx[b]) < 5.0 * epsilon) return false;
      }
    }
  }
  for (std::size_t m : net.members) {
    if (seen[m] != 1) return false;
  }
  return coloring.classes.size() == coloring.k;
}

std::optional<ConcentrationWitness> concentration_witness(const FiniteMMSpace& weighted_screen, const Net& net,
                                                          double epsilon, double mass_floor) {
  ConcentrationWitness best;
  bool found = false;
  for (std::size_t c : net.members) {
    const double core = ball_mass(weighted_screen, c, 2.0 * epsilon);
    if (!found || core > best.core_mass) {
      best.center = c;
      best.core_mass = core;
      found = true;
    }
  }
  if (!found || !(best.core_mass >= mass_floor)) return std::nullopt;
  const double radius = 3.0 * epsilon;
  const auto row = weighted_screen.row(best.center);
  for (std::size_t y = 0; y < weighted_screen.size(); ++y) {
    if (row[y] <= radius) {
      best.ball_mass += weighted_screen.weight(y);
    } else {
      best.residual += weighted_screen.weight(y);
    }
  }
  best.ball_diameter = set_diameter(weighted_screen, closed_ball(weighted_screen, best.center, radius));
  return best;
}

namespace reference {

DoublingProfile doubling_profile_serial(const FiniteMMSpace& space, double horizon, const GridSpec& grid) {
  check_profile_input(space, horizon);
  const auto radii = grid_radii(space, horizon, grid);
  std::vector<double> constants(radii.size(), 1.0);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      const double ratio = ball_mass(space, x, 2.0 * radii[k]) / ball_mass(space, x, radii[k]);
      constants[k] = std::max(constants[k], ratio);
    }
  }
  return DoublingProfile(horizon, radii, std::move(constants));
}

}  // namespace reference

}  // namespace mmconc
