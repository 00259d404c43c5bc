#include <algorithm>
#include <cmath>

#include "mmconc/observable.hpp"

namespace mmconc {

namespace {

template <typename ImageDistance>
LipschitzVerdict check_pairs(const FiniteMMSpace& source, ImageDistance image_distance) {
  LipschitzVerdict verdict;
  verdict.valid = true;
  const std::size_t n = source.size();
  if (n >= 2) verdict.worst_j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = source.distance(i, j);
      const double moved = image_distance(i, j);
      const double ratio = moved / d;
      if (ratio > verdict.constant) {
        verdict.constant = ratio;
        verdict.worst_i = i;
        verdict.worst_j = j;
      }
      if (!(moved <= d + kLipschitzSlack * d)) verdict.valid = false;
    }
  }
  return verdict;
}

}  // namespace

LipschitzVerdict validate_lipschitz(const FiniteMMSpace& source, const RealMap& map) {
  if (map.values.size() != source.size()) throw InputError("real map is not total on the source");
  for (double v : map.values) {
    if (!std::isfinite(v)) throw InputError("real map has a non-finite value");
  }
  return check_pairs(source, [&](std::size_t i, std::size_t j) {
    return std::abs(map.values[i] - map.values[j]);
  });
}

LipschitzVerdict validate_lipschitz(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                    const ScreenMap& map) {
  if (map.targets.size() != source.size()) throw InputError("screen map is not total on the source");
  for (std::size_t t : map.targets) {
    if (t >= screen.size()) throw InputError("screen map points outside the screen");
  }
  return check_pairs(source, [&](std::size_t i, std::size_t j) {
    return screen.distance(map.targets[i], map.targets[j]);
  });
}

RealMeasure pushforward(const FiniteMMSpace& source, const RealMap& map) {
  return RealMeasure::from_values(map.values, source.weights());
}

FiniteMMSpace pushforward(const FiniteMMSpace& source, const FiniteMMSpace& screen, const ScreenMap& map) {
  if (map.targets.size() != source.size()) throw InputError("screen map is not total on the source");
  std::vector<double> weights(screen.size(), 0.0);
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (map.targets[i] >= screen.size()) throw InputError("screen map points outside the screen");
    weights[map.targets[i]] += source.weight(i);
  }
  return screen.with_weights(std::move(weights));
}

RealMap distance_function(const FiniteMMSpace& space, const PointSet& subset) {
  if (subset.empty()) throw InputError("distance to an empty set is undefined");
  RealMap f;
  f.values.resize(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) f.values[x] = point_set_distance(space, x, subset);
  return f;
}

}  // namespace mmconc
