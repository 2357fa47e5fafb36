#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "seqbench/core/black_box.hpp"

namespace seqbench::harness {

inline constexpr std::size_t kHistogramBins = 20;

struct BruteForceResult {
  double max_score = 0.0;
  std::size_t argmax_count = 0;
  std::size_t evaluations = 0;
  /// Bin i covers [i/20, (i+1)/20); a score of 1.0 lands in the last bin.
  std::array<std::size_t, kHistogramBins> histogram{};
};

/// Exhaustive enumeration. Throws InstanceTooLarge when |A|^L > bound.
BruteForceResult brute_force(const Oracle& oracle, std::uint64_t bound = 1'000'000);

}  // namespace seqbench::harness
