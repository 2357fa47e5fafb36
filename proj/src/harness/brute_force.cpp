#include "seqbench/harness/brute_force.hpp"

#include <algorithm>

#include "seqbench/core/error.hpp"

namespace seqbench::harness {

BruteForceResult brute_force(const Oracle& oracle, std::uint64_t bound) {
  const auto& info = oracle.info();
  const std::uint64_t A = info.alphabet.size();
  const std::size_t L = info.sequence_length;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < L; ++i) {
    if (total > bound / A) {
      throw Error(ErrorCode::InstanceTooLarge, std::to_string(A) + "^" + std::to_string(L) +
                                                   " sequences exceed the bound of " + std::to_string(bound));
    }
    total *= A;
  }
  if (total > bound) throw Error(ErrorCode::InstanceTooLarge, "instance exceeds the bound");

  BruteForceResult result;
  result.max_score = -1.0;
  Sequence seq(std::vector<Token>(L, 0));
  for (std::uint64_t k = 0; k < total; ++k) {
    const double score = oracle.score(seq);
    ++result.evaluations;
    const auto bin = std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(score * kHistogramBins));
    ++result.histogram[bin];
    if (score > result.max_score) {
      result.max_score = score;
      result.argmax_count = 1;
    } else if (score == result.max_score) {
      ++result.argmax_count;
    }
    // Odometer increment, last position fastest.
    for (std::size_t i = L; i-- > 0;) {
      if (++seq[i] < A) break;
      seq[i] = 0;
    }
  }
  return result;
}

}  // namespace seqbench::harness
