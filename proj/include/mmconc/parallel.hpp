#pragma once

#include <cstdint>
#include <random>

namespace mmconc {

/// Number of OpenMP workers used by the parallel kernels. Results never
/// depend on it; only wall time does.
void set_worker_count(int workers);
int worker_count();

/// splitmix64 finalizer; used to derive independent RNG streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// RNG for task `stream` of a computation seeded with `seed`. Streams are
/// keyed by task index, so a schedule cannot change what a task draws.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t salt = 0) {
  return std::mt19937_64(mix64(mix64(seed ^ mix64(salt)) + stream));
}

}  // namespace mmconc
