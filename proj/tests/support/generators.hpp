#pragma once

// Random validated spaces for property tests. Distances are small integers
// scaled by a power of two and weights are dyadic, so every mass sum and
// distance comparison in the tests is exact in double.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "mmconc/space.hpp"

namespace mmconc::check {

/// Shortest paths of a random connected graph with integer edge lengths
/// 1..4, divided by `scale`. Weights are k/16 with k in [min_w16, 16].
inline FiniteMMSpace random_graph_space(std::mt19937_64& rng, std::size_t n, double scale = 4.0,
                                        int min_w16 = 1) {
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<int> wt(min_w16, 16);
  std::bernoulli_distribution extra(0.35);
  const double inf = 1e300;
  std::vector<double> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  auto link = [&](std::size_t a, std::size_t b) {
    const double l = len(rng);
    d[a * n + b] = std::min(d[a * n + b], l);
    d[b * n + a] = std::min(d[b * n + a], l);
  };
  for (std::size_t i = 1; i < n; ++i) link(i, std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (extra(rng)) link(i, j);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    }
  }
  for (double& x : d) x /= scale;
  std::vector<std::string> labels(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = "p" + std::to_string(i);
    weights[i] = wt(rng) / 16.0;
  }
  return FiniteMMSpace::from_metric_unchecked(std::move(labels), std::move(d), std::move(weights), min_w16 <= 0);
}

/// Dyadic kappa in (0, limit): multiples of 1/64.
inline double random_kappa(std::mt19937_64& rng, double limit) {
  const int top = std::max(1, static_cast<int>(limit * 64.0) - 1);
  return std::uniform_int_distribution<int>(1, top)(rng) / 64.0;
}

/// Random 1-Lipschitz real map: min over random anchors of
/// (offset + d(., anchor)), clipped to a random window; both operations
/// keep the Lipschitz constant at most 1.
inline std::vector<double> random_lipschitz_values(std::mt19937_64& rng, const FiniteMMSpace& space) {
  const std::size_t n = space.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> off(0, 8);
  const std::size_t anchors = 1 + pick(rng) % 3;
  std::vector<double> f(n, 1e300);
  for (std::size_t a = 0; a < anchors; ++a) {
    const std::size_t c = pick(rng);
    const double o = off(rng) / 8.0;
    for (std::size_t x = 0; x < n; ++x) f[x] = std::min(f[x], o + space.distance(x, c));
  }
  const double lo = off(rng) / 8.0;
  const double hi = lo + off(rng) / 4.0;
  for (double& v : f) v = std::clamp(v, lo, hi);
  return f;
}

}  // namespace mmconc::check
