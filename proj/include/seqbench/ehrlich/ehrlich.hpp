#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/black_box.hpp"
#include "seqbench/core/rng.hpp"
#include "seqbench/core/sequence.hpp"

namespace seqbench::ehrlich {

/// Row-stochastic |A|x|A| matrix defining which adjacent token pairs are
/// feasible. Diagonal entries are positive and the support graph is
/// strongly connected.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(std::size_t size, std::vector<double> probs);

  std::size_t size() const noexcept { return size_; }
  double prob(Token from, Token to) const { return probs_[from * size_ + to]; }
  bool allowed(Token from, Token to) const { return prob(from, to) > 0.0; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  /// Fraction of off-diagonal entries that are zero.
  double sparsity() const;

  bool operator==(const TransitionMatrix&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> probs_;
};

bool is_strongly_connected(std::size_t size, const std::vector<bool>& support);

/// Dense Dirichlet(1) rows, then roughly `sparsity` of the off-diagonal
/// entries zeroed; zeroed entries are restored in random order until the
/// support is strongly connected. Rows are renormalized last.
TransitionMatrix generate_transition_matrix(std::size_t alphabet_size, double sparsity, Rng& rng);

/// Markov chain sample: uniform first symbol, then transitions drawn from
/// the matrix rows.
Sequence sample_chain(const TransitionMatrix& matrix, std::size_t length, Rng& rng);

/// n_motifs vectors of motif_length tokens, split from a single chain
/// sample of length n_motifs * motif_length.
std::vector<std::vector<Token>> sample_motifs(const TransitionMatrix& matrix, std::size_t n_motifs,
                                              std::size_t motif_length, Rng& rng);

/// Offsets for one motif: span drawn uniformly from [motif_length, window],
/// interior offsets a uniform subset of the positions strictly inside it.
/// Throws InfeasibleConfig if window < motif_length.
std::vector<std::size_t> sample_spacings(std::size_t motif_length, std::size_t window, Rng& rng);

struct SpacedMotif {
  std::vector<Token> symbols;
  std::vector<std::size_t> offsets;

  std::size_t length() const noexcept { return symbols.size(); }
  std::size_t span() const noexcept { return offsets.empty() ? 0 : offsets.back() + 1; }
  bool operator==(const SpacedMotif&) const = default;
};

/// Best quantized partial match over all anchors:
/// max_a floor(c(a) * q / l) / q.
double motif_satisfaction(const Sequence& seq, const SpacedMotif& motif, std::size_t quantization);

bool is_feasible(const Sequence& seq, const TransitionMatrix& matrix);

struct EhrlichConfig {
  std::size_t alphabet_size = 20;
  std::size_t sequence_length = 15;
  std::size_t n_motifs = 2;
  std::size_t motif_length = 7;
  /// 0 selects the default, quantization == motif_length.
  std::size_t quantization = 0;
  double sparsity = 0.5;
  /// Empty selects "Ehrlich(L=<sequence_length>)".
  std::string name;

  std::size_t effective_quantization() const noexcept {
    return quantization == 0 ? motif_length : quantization;
  }

  bool operator==(const EhrlichConfig&) const = default;
};

/// Motif i must fit in window i; L is split into n_motifs equal contiguous
/// windows with the remainder going to the last one.
std::vector<std::pair<std::size_t, std::size_t>> motif_windows(std::size_t sequence_length,
                                                               std::size_t n_motifs);

class EhrlichOracle final : public Oracle {
 public:
  /// Throws InfeasibleConfig for parameters that admit no optimum.
  static EhrlichOracle generate(const EhrlichConfig& config, std::uint64_t seed);
  static EhrlichOracle from_json(const nlohmann::json& doc);

  const ProblemInfo& info() const override { return info_; }
  double score(const Sequence& seq) const override;

  nlohmann::json to_json() const;

  const TransitionMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<SpacedMotif>& motifs() const noexcept { return motifs_; }
  std::size_t quantization() const noexcept { return quantization_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const EhrlichConfig& config() const noexcept { return config_; }

  /// Feasible sequence scoring exactly 1.0.
  Sequence construct_optimum() const;

 private:
  EhrlichOracle() = default;

  EhrlichConfig config_;
  std::uint64_t seed_ = 0;
  ProblemInfo info_;
  TransitionMatrix matrix_;
  std::vector<SpacedMotif> motifs_;
  std::size_t quantization_ = 1;
};

inline double ehrlich_score(const Sequence& seq, const EhrlichOracle& oracle) {
  return oracle.score(seq);
}

/// Throws InfeasibleConfig when no placement exists.
Sequence construct_optimum(const EhrlichOracle& oracle);

std::vector<std::pair<Sequence, double>> sample_initial_dataset(const EhrlichOracle& oracle,
                                                                std::size_t n, Rng& rng);

}  // namespace seqbench::ehrlich
