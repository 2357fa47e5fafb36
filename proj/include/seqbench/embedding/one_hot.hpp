#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "seqbench/core/sequence.hpp"

namespace seqbench {

/// Point in [0,1]^(L*|A|); block b holds the |A| coordinates of position b.
using OneHotVector = Eigen::VectorXd;

/// Throws UnknownToken for indices outside the alphabet.
OneHotVector one_hot_encode(const Sequence& seq, std::size_t alphabet_size);

/// Per-block argmax, ties to the lowest index. Throws DimensionMismatch
/// unless vec.size() == sequence_length * alphabet_size.
Sequence one_hot_decode(const Eigen::Ref<const Eigen::VectorXd>& vec, std::size_t sequence_length,
                        std::size_t alphabet_size);

/// Clamp every coordinate into [0, 1].
inline Eigen::VectorXd clip_unit(const Eigen::Ref<const Eigen::VectorXd>& vec) {
  return vec.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace seqbench
