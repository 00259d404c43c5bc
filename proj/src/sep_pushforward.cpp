#include "mmconc/observable.hpp"
#include "mmconc/separation.hpp"

namespace mmconc {

namespace {

bool compare_sides(const FiniteMMSpace& source, const FiniteMMSpace& image, const SepQuery& query,
                   const SepBudget& budget) {
  const double upstairs = sep_exact(source, query, budget).value;
  const double downstairs = sep_exact(image, query, budget).value;
  return downstairs <= upstairs + kLipschitzSlack * (1.0 + upstairs);
}

}  // namespace

bool sep_pushforward_check(const FiniteMMSpace& source, const FiniteMMSpace& screen, const ScreenMap& map,
                           const SepQuery& query, const SepBudget& budget) {
  if (!validate_lipschitz(source, screen, map).valid) {
    throw PreconditionError("pushforward check needs a 1-Lipschitz map");
  }
  return compare_sides(source, pushforward(source, screen, map), query, budget);
}

bool sep_pushforward_check(const FiniteMMSpace& source, const RealMap& map, const SepQuery& query,
                           const SepBudget& budget) {
  if (!validate_lipschitz(source, map).valid) {
    throw PreconditionError("pushforward check needs a 1-Lipschitz map");
  }
  return compare_sides(source, pushforward(source, map).as_space(), query, budget);
}

}  // namespace mmconc
