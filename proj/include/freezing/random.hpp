#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace freezing {

using Rng = std::mt19937_64;

/// Seed for replicate `index` of a run seeded with `master`. Pure function of
/// its arguments, so replicate streams do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

/// Uniform double on [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given rate (rate > 0).
double exponential(Rng& rng, double rate);

double standard_normal(Rng& rng);

/// Runs body(i) for i in [0, count) on `threads` workers. Work items are
/// claimed dynamically; callers write results by index, which keeps outputs
/// independent of scheduling. threads == 0 means hardware concurrency.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace freezing
