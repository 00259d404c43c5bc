#include <algorithm>
#include <variant>

#include "mmconc/families.hpp"
#include "mmconc/parallel.hpp"

namespace mmconc {

namespace {

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t row, std::uint64_t column, std::uint64_t kappa) {
  return mix64(mix64(mix64(seed ^ mix64(row)) + column) ^ kappa);
}

void fill_roster(LevyReport& report, const std::vector<RosterScreen>& roster) {
  std::vector<DoublingProfile> computed;
  for (const auto& screen : roster) {
    RosterEntry entry;
    entry.name = screen.name;
    entry.points = screen.space.size();
    entry.labels = screen.space.labels();
    entry.diameter = screen.space.diameter();
    try {
      entry.profile = doubling_profile(screen.space, report.horizon);
      computed.push_back(*entry.profile);
    } catch (const Error& e) {
      entry.status = e.what();
    }
    report.roster.push_back(std::move(entry));
  }
  if (!computed.empty()) report.envelope = envelope(computed);
}

ScreenCell screen_cell(const FiniteMMSpace& space, const RosterScreen& screen, double kappa, double epsilon,
                       double mass_floor, ScreenSampling sampling) {
  ScreenCell cell;
  cell.screen = screen.name;
  cell.kappa = kappa;
  try {
    auto estimate = obsdiam_screen_estimate(space, screen.space, kappa, sampling);
    cell.bracket = std::move(estimate.bracket);
    cell.starved = estimate.starved;
    cell.ok = true;
    if (const auto* map = std::get_if<ScreenMap>(&cell.bracket.witness)) {
      const FiniteMMSpace pushed = pushforward(space, screen.space, *map);
      const Net net = build_net(screen.space, epsilon);
      cell.witness = concentration_witness(pushed, net, epsilon, mass_floor);
    }
  } catch (const Error& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

LevyReport run_levy_experiment(const std::vector<FamilySpec>& family, const std::vector<RosterScreen>& roster,
                               const LevyOptions& options) {
  if (options.kappas.empty()) throw InputError("experiment needs at least one kappa");
  for (double k : options.kappas) {
    if (!(k > 0.0)) throw InputError("experiment kappas must be > 0");
  }
  if (roster.empty()) throw InputError("experiment needs at least one screen");

  LevyReport report;
  report.kappas = options.kappas;
  report.seed = options.seed;
  double widest = 0.0;
  for (const auto& screen : roster) widest = std::max(widest, screen.space.diameter());
  report.horizon = options.horizon.value_or(widest > 0.0 ? widest : 1.0);
  if (!(report.horizon > 0.0)) throw InputError("doubling horizon R must be > 0");
  report.epsilon = options.epsilon.value_or(3.0 * report.horizon / 32.0);
  if (!(report.epsilon > 0.0)) throw InputError("witness scale eps must be > 0");
  fill_roster(report, roster);

  for (std::size_t r = 0; r < family.size(); ++r) {
    const FiniteMMSpace space = generate(family[r]);
    LevyRow row;
    row.family = family_label(family[r]);
    row.n = family[r].n;
    row.points = space.size();
    row.labels = space.labels();
    row.mass = space.total_mass();

    for (std::size_t k = 0; k < options.kappas.size(); ++k) {
      const double kappa = options.kappas[k];
      SepCell cell;
      cell.kappa = kappa;
      if (space.size() >= 2) {
        const SepQuery query{kappa, kappa};
        cell.lower = sep_lower_bound(space, query, options.sep_effort, cell_seed(options.seed, r, 0, k));
        if (sep_exact_fits(space, query, options.sep_budget)) cell.exact = sep_exact(space, query, options.sep_budget);
      }
      row.sep.push_back(std::move(cell));
    }

    row.roster_sup.assign(options.kappas.size(), 0.0);
    for (std::size_t s = 0; s < roster.size(); ++s) {
      for (std::size_t k = 0; k < options.kappas.size(); ++k) {
        ScreenSampling sampling = options.sampling;
        sampling.seed = cell_seed(options.seed, r, s + 1, k);
        auto cell = screen_cell(space, roster[s], options.kappas[k], report.epsilon,
                                options.mass_floor_fraction * row.mass, sampling);
        if (cell.ok) row.roster_sup[k] = std::max(row.roster_sup[k], cell.bracket.lower);
        row.cells.push_back(std::move(cell));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace mmconc
