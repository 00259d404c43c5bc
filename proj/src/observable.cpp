#include "mmconc/observable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmconc/parallel.hpp"

namespace mmconc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double evaluate(const FiniteMMSpace& space, const std::vector<double>& values, double target) {
  return partial_diameter_real(RealMeasure::from_values(values, space.weights()), target);
}

// Pool of subsets A whose distance functions d(., A) seed the lower bound.
std::vector<PointSet> subset_pool(const FiniteMMSpace& space, double kappa, const RealBracketOptions& opt) {
  const std::size_t n = space.size();
  std::vector<PointSet> pool;
  for (std::size_t i = 0; i < n; ++i) pool.push_back(PointSet::single(i, n));

  if (n <= opt.all_subsets_up_to) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (std::has_single_bit(mask)) continue;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) idx.push_back(i);
      }
      pool.emplace_back(std::move(idx), n);
    }
  } else {
    for (std::size_t s = 0; s < opt.random_subsets; ++s) {
      auto rng = stream_rng(opt.seed, s, 0xa11);
      std::bernoulli_distribution coin(0.5);
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (coin(rng)) idx.push_back(i);
      }
      if (idx.empty()) idx.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
      pool.emplace_back(std::move(idx), n);
    }
  }

  if (n >= 2) {
    for (std::size_t f = 0; f < opt.witness_kappa_factors.size(); ++f) {
      const double k = kappa * opt.witness_kappa_factors[f];
      if (!(k > 0.0)) continue;
      const SepQuery query{k, k};
      const SepResult sep = sep_exact_fits(space, query, opt.sep_budget)
                                ? sep_exact(space, query, opt.sep_budget)
                                : sep_lower_bound(space, query, opt.sep_effort, mix64(opt.seed + f));
      for (const auto& w : sep.witnesses) pool.push_back(w);
    }
  }
  return pool;
}

// Coordinate ascent over the Lipschitz polytope: move one value to an end of
// its feasible interval [max(f(y) - d), min(f(y) + d)].
struct Chain {
  double value = -1.0;
  std::vector<double> values;
};

Chain climb(const FiniteMMSpace& space, std::vector<double> f, double target, std::size_t moves,
            std::mt19937_64& rng) {
  const std::size_t n = space.size();
  Chain best{evaluate(space, f, target), f};
  double current = best.value;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::bernoulli_distribution upward(0.5);
  for (std::size_t move = 0; move < moves; ++move) {
    const std::size_t x = pick(rng);
    double lo = -kInf;
    double hi = kInf;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      lo = std::max(lo, f[y] - space.distance(x, y));
      hi = std::min(hi, f[y] + space.distance(x, y));
    }
    const double next = upward(rng) ? hi : lo;
    if (!std::isfinite(next) || next == f[x]) continue;
    const double old = f[x];
    f[x] = next;
    const double value = evaluate(space, f, target);
    if (value >= current) {
      current = value;
      if (value > best.value) best = {value, f};
    } else {
      f[x] = old;
    }
  }
  return best;
}

}  // namespace

Bracket obsdiam_real_bracket(const FiniteMMSpace& space, double kappa, const RealBracketOptions& opt) {
  if (!(kappa > 0.0)) throw InputError("observable diameter needs kappa > 0");
  const double target = space.total_mass() - kappa;
  Bracket bracket;

  const auto pool = subset_pool(space, kappa, opt);
  std::vector<double> scores(pool.size());
  const auto spool = static_cast<std::int64_t>(pool.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t c = 0; c < spool; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    scores[idx] = evaluate(space, distance_function(space, pool[idx]).values, target);
  }

  std::vector<std::size_t> ranked(pool.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  bracket.lower = scores[ranked.front()];
  bracket.witness_subset = pool[ranked.front()];
  bracket.witness = distance_function(space, pool[ranked.front()]);

  const std::size_t chains = space.size() >= 2 ? std::max<std::size_t>(opt.chains, 1) : 0;
  std::vector<Chain> results(chains);
  const auto schains = static_cast<std::int64_t>(chains);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < schains; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    auto rng = stream_rng(opt.seed, idx, 0xc1b);
    auto start = distance_function(space, pool[ranked[idx % ranked.size()]]).values;
    results[idx] = climb(space, std::move(start), target, opt.effort / chains, rng);
  }
  for (const auto& chain : results) {
    if (chain.value > bracket.lower) {
      const RealMap candidate{chain.values};
      if (!validate_lipschitz(space, candidate).valid) {
        bracket.diagnostics.push_back("discarded a local-search map that failed certification");
        continue;
      }
      bracket.lower = chain.value;
      bracket.witness = candidate;
      bracket.witness_subset = PointSet();
    }
  }

  const double k = kappa * opt.upper_factor;
  const SepQuery query{k, k};
  if (sep_exact_fits(space, query, opt.sep_budget)) {
    bracket.upper = sep_exact(space, query, opt.sep_budget).value;
    bracket.upper_source = "Sep(X; kappa/2, kappa/2) by exhaustive search";
  } else {
    bracket.upper = kInf;
    bracket.upper_available = false;
    bracket.upper_source = "unavailable: exhaustive separation search over budget";
  }
  return bracket;
}

std::optional<ScreenMap> sample_screen_map(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                           std::mt19937_64& rng, std::size_t node_budget) {
  const std::size_t n = source.size();
  const std::size_t k = screen.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  ScreenMap map;
  map.targets.assign(n, 0);
  // frames[pos] holds the shuffled admissible images of order[pos].
  struct Frame {
    std::vector<std::size_t> options;
    std::size_t next = 0;
  };
  std::vector<Frame> frames;
  frames.reserve(n);

  auto admissible_images = [&](std::size_t pos) {
    Frame frame;
    const std::size_t p = order[pos];
    for (std::size_t y = 0; y < k; ++y) {
      bool ok = true;
      for (std::size_t prev = 0; prev < pos && ok; ++prev) {
        const std::size_t q = order[prev];
        ok = screen.distance(y, map.targets[q]) <= source.distance(p, q);
      }
      if (ok) frame.options.push_back(y);
    }
    std::shuffle(frame.options.begin(), frame.options.end(), rng);
    return frame;
  };

  frames.push_back(admissible_images(0));
  std::size_t nodes = 0;
  while (!frames.empty()) {
    auto& frame = frames.back();
    if (frame.next == frame.options.size()) {
      frames.pop_back();
      continue;
    }
    if (++nodes > node_budget) return std::nullopt;
    const std::size_t pos = frames.size() - 1;
    map.targets[order[pos]] = frame.options[frame.next++];
    if (pos + 1 == n) return map;
    frames.push_back(admissible_images(pos + 1));
  }
  return std::nullopt;
}

std::optional<ScreenMap> level_screen_map(const FiniteMMSpace& source, const FiniteMMSpace& screen,
                                          const RealMap& g, std::size_t start) {
  const std::size_t n = source.size();
  const std::size_t k = screen.size();
  if (g.values.size() != n) throw InputError("level map needs one value per source point");
  if (start >= k) throw InputError("level map start is not a screen point");
  std::vector<double> levels(g.values);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t count = levels.size();
  std::vector<double> level_mass(count, 0.0);
  std::vector<std::size_t> level_of(n);
  for (std::size_t x = 0; x < n; ++x) {
    level_of[x] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), g.values[x]) - levels.begin());
    level_mass[level_of[x]] += source.weight(x);
  }

  std::vector<std::size_t> image(count, start);
  std::vector<double> spread(k, 0.0);
  for (std::size_t y = 0; y < k; ++y) spread[y] = level_mass[0] * screen.distance(y, start);
  for (std::size_t j = 1; j < count; ++j) {
    std::size_t best = k;
    for (std::size_t y = 0; y < k; ++y) {
      bool ok = true;
      for (std::size_t i = 0; i < j && ok; ++i) {
        const double gap = levels[j] - levels[i];
        ok = screen.distance(y, image[i]) <= gap + kLipschitzSlack * gap;
      }
      if (ok && (best == k || spread[y] > spread[best])) best = y;
    }
    if (best == k) return std::nullopt;
    image[j] = best;
    for (std::size_t y = 0; y < k; ++y) spread[y] += level_mass[j] * screen.distance(y, best);
  }
  ScreenMap map;
  map.targets.resize(n);
  for (std::size_t x = 0; x < n; ++x) map.targets[x] = image[level_of[x]];
  return map;
}

ScreenEstimate obsdiam_screen_estimate(const FiniteMMSpace& space, const FiniteMMSpace& screen,
                                       double kappa, const ScreenSampling& opt) {
  if (!(kappa > 0.0)) throw InputError("observable diameter needs kappa > 0");
  const double target = space.total_mass() - kappa;
  const std::size_t n = space.size();
  ScreenEstimate out;
  Bracket& bracket = out.bracket;

  // The constant map witnesses lower >= 0.
  ScreenMap constant{std::vector<std::size_t>(n, 0)};
  bracket.lower = partial_diameter_screen(pushforward(space, screen, constant), target, opt.screen_budget);
  bracket.witness = constant;

  if (screen.size() == n) {
    ScreenMap index_map;
    index_map.targets.resize(n);
    std::iota(index_map.targets.begin(), index_map.targets.end(), std::size_t{0});
    if (validate_lipschitz(space, screen, index_map).valid) {
      const double value =
          partial_diameter_screen(pushforward(space, screen, index_map), target, opt.screen_budget);
      if (value > bracket.lower) {
        bracket.lower = value;
        bracket.witness = index_map;
      }
    }
  }

  // Evenly spaced picks from 0..size-1.
  auto spaced = [](std::size_t size, std::size_t count) {
    std::vector<std::size_t> picks;
    count = std::min(count, size);
    for (std::size_t i = 0; i < count; ++i) picks.push_back(i * size / count);
    return picks;
  };
  const auto anchors = spaced(n, opt.level_anchors);
  const auto starts = spaced(screen.size(), opt.level_starts);
  const std::size_t level_count = anchors.size() * starts.size();
  std::vector<std::optional<ScreenMap>> level_maps(level_count);
  std::vector<double> level_values(level_count, -1.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(level_count); ++c) {
    const auto idx = static_cast<std::size_t>(c);
    const RealMap g = distance_function(space, PointSet::single(anchors[idx / starts.size()], n));
    level_maps[idx] = level_screen_map(space, screen, g, starts[idx % starts.size()]);
    if (level_maps[idx] && !validate_lipschitz(space, screen, *level_maps[idx]).valid) level_maps[idx].reset();
    if (level_maps[idx]) {
      level_values[idx] =
          partial_diameter_screen(pushforward(space, screen, *level_maps[idx]), target, opt.screen_budget);
    }
  }
  for (std::size_t c = 0; c < level_count; ++c) {
    if (level_maps[c] && level_values[c] > bracket.lower) {
      bracket.lower = level_values[c];
      bracket.witness = *level_maps[c];
    }
  }

  std::vector<std::optional<ScreenMap>> maps(opt.samples);
  std::vector<double> values(opt.samples, -1.0);
  const auto ssamples = static_cast<std::int64_t>(opt.samples);
  const std::size_t node_budget = std::max<std::size_t>(opt.node_budget_per_point * n, 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < ssamples; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    auto rng = stream_rng(opt.seed, idx, 0x5c2);
    maps[idx] = sample_screen_map(space, screen, rng, node_budget);
    if (maps[idx]) {
      values[idx] = partial_diameter_screen(pushforward(space, screen, *maps[idx]), target, opt.screen_budget);
    }
  }
  for (std::size_t s = 0; s < opt.samples; ++s) {
    if (!maps[s]) {
      ++out.starved;
      continue;
    }
    if (values[s] > bracket.lower) {
      bracket.lower = values[s];
      bracket.witness = *maps[s];
    }
  }
  if (out.starved > 0) {
    bracket.diagnostics.push_back(std::to_string(out.starved) + " of " + std::to_string(opt.samples) +
                                  " samples starved before completing a map");
  }

  const double screen_diameter = screen.diameter();
  double source_bound = kInf;
  std::string source_how;
  std::size_t support = 0;
  for (double w : space.weights()) support += w > 0.0 ? 1 : 0;
  if (support <= opt.exact_upper_up_to) {
    source_bound = partial_diameter_screen(space, target, ScreenBudget{opt.exact_upper_up_to});
    source_how = "diam(mu, m - kappa) exact";
  } else {
    source_bound = partial_diameter_ball_bound(space, target);
    source_how = "diam(mu, m - kappa) ball bound";
  }
  if (screen_diameter <= source_bound) {
    bracket.upper = screen_diameter;
    bracket.upper_source = "screen diameter";
  } else {
    bracket.upper = source_bound;
    bracket.upper_source = source_how;
  }
  return out;
}

}  // namespace mmconc
