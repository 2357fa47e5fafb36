#include "seqbench/embedding/one_hot.hpp"

#include <string>

#include "seqbench/core/error.hpp"

namespace seqbench {

OneHotVector one_hot_encode(const Sequence& seq, std::size_t alphabet_size) {
  OneHotVector out = OneHotVector::Zero(static_cast<Eigen::Index>(seq.size() * alphabet_size));
  for (std::size_t b = 0; b < seq.size(); ++b) {
    if (seq[b] >= alphabet_size) {
      throw Error(ErrorCode::UnknownToken, "index " + std::to_string(seq[b]) + " at position " +
                                               std::to_string(b));
    }
    out[static_cast<Eigen::Index>(b * alphabet_size + seq[b])] = 1.0;
  }
  return out;
}

Sequence one_hot_decode(const Eigen::Ref<const Eigen::VectorXd>& vec, std::size_t sequence_length,
                        std::size_t alphabet_size) {
  if (static_cast<std::size_t>(vec.size()) != sequence_length * alphabet_size) {
    throw Error(ErrorCode::DimensionMismatch,
                "one-hot vector has " + std::to_string(vec.size()) + " entries, expected " +
                    std::to_string(sequence_length * alphabet_size));
  }
  std::vector<Token> tokens(sequence_length);
  for (std::size_t b = 0; b < sequence_length; ++b) {
    const auto base = static_cast<Eigen::Index>(b * alphabet_size);
    Token best = 0;
    for (std::size_t a = 1; a < alphabet_size; ++a) {
      if (vec[base + static_cast<Eigen::Index>(a)] > vec[base + best]) best = static_cast<Token>(a);
    }
    tokens[b] = best;
  }
  return Sequence(std::move(tokens));
}

}  // namespace seqbench
