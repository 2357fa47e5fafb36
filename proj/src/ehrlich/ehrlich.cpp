#include "seqbench/ehrlich/ehrlich.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqbench/core/error.hpp"

namespace seqbench::ehrlich {

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

std::vector<bool> reachable(std::size_t size, const std::vector<bool>& support, bool reverse) {
  std::vector<bool> seen(size, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < size; ++v) {
      const bool edge = reverse ? support[v * size + u] : support[u * size + v];
      if (edge && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

Token sample_row(const TransitionMatrix& matrix, Token from, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  Token last_allowed = from;
  for (Token to = 0; to < matrix.size(); ++to) {
    const double p = matrix.prob(from, to);
    if (p <= 0.0) continue;
    acc += p;
    last_allowed = to;
    if (u < acc) return to;
  }
  // Rounding left u just above the accumulated mass.
  return last_allowed;
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::size_t size, std::vector<double> probs)
    : size_(size), probs_(std::move(probs)) {
  if (probs_.size() != size_ * size_) {
    throw Error(ErrorCode::DimensionMismatch, "transition matrix needs size^2 entries");
  }
}

double TransitionMatrix::sparsity() const {
  if (size_ < 2) return 0.0;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) {
      if (i != j && probs_[i * size_ + j] == 0.0) ++zeros;
    }
  }
  return static_cast<double>(zeros) / static_cast<double>(size_ * (size_ - 1));
}

bool is_strongly_connected(std::size_t size, const std::vector<bool>& support) {
  if (size == 0) return true;
  const auto fwd = reachable(size, support, false);
  const auto bwd = reachable(size, support, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

TransitionMatrix generate_transition_matrix(std::size_t alphabet_size, double sparsity, Rng& rng) {
  if (alphabet_size < 2) {
    throw Error(ErrorCode::InfeasibleConfig, "alphabet size must be at least 2");
  }
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error(ErrorCode::InfeasibleConfig, "sparsity must lie in [0, 1)");
  }
  const std::size_t n = alphabet_size;
  std::vector<double> probs(n * n);
  for (auto& p : probs) p = -std::log1p(-uniform01(rng));  // Exp(1) == Gamma(1)

  std::vector<std::size_t> off_diagonal;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) off_diagonal.push_back(i * n + j);
    }
  }
  shuffle(off_diagonal, rng);
  const auto n_zero = static_cast<std::size_t>(
      std::floor(sparsity * static_cast<double>(off_diagonal.size())));

  std::vector<bool> support(n * n, true);
  std::vector<std::size_t> zeroed(off_diagonal.begin(), off_diagonal.begin() + n_zero);
  for (std::size_t idx : zeroed) support[idx] = false;
  // Restore in a fresh random order until the chain is irreducible again.
  shuffle(zeroed, rng);
  for (std::size_t k = 0; k < zeroed.size() && !is_strongly_connected(n, support); ++k) {
    support[zeroed[k]] = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!support[i * n + j]) probs[i * n + j] = 0.0;
      row += probs[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) probs[i * n + j] /= row;
  }
  return TransitionMatrix(n, std::move(probs));
}

Sequence sample_chain(const TransitionMatrix& matrix, std::size_t length, Rng& rng) {
  std::vector<Token> out;
  out.reserve(length);
  if (length == 0) return Sequence(std::move(out));
  out.push_back(static_cast<Token>(uniform_index(rng, matrix.size())));
  while (out.size() < length) out.push_back(sample_row(matrix, out.back(), rng));
  return Sequence(std::move(out));
}

std::vector<std::vector<Token>> sample_motifs(const TransitionMatrix& matrix, std::size_t n_motifs,
                                              std::size_t motif_length, Rng& rng) {
  if (n_motifs == 0 || motif_length == 0) {
    throw Error(ErrorCode::InfeasibleConfig, "need at least one motif of length >= 1");
  }
  const Sequence chain = sample_chain(matrix, n_motifs * motif_length, rng);
  std::vector<std::vector<Token>> motifs(n_motifs);
  for (std::size_t i = 0; i < n_motifs; ++i) {
    motifs[i].assign(chain.begin() + static_cast<std::ptrdiff_t>(i * motif_length),
                     chain.begin() + static_cast<std::ptrdiff_t>((i + 1) * motif_length));
  }
  return motifs;
}

std::vector<std::size_t> sample_spacings(std::size_t motif_length, std::size_t window, Rng& rng) {
  if (motif_length == 0 || window < motif_length) {
    throw Error(ErrorCode::InfeasibleConfig, "window " + std::to_string(window) +
                                                 " cannot hold a motif of length " +
                                                 std::to_string(motif_length));
  }
  if (motif_length == 1) return {0};
  const std::size_t span = motif_length + uniform_index(rng, window - motif_length + 1);
  // Interior offsets: a uniform (l-2)-subset of {1, ..., span-2}.
  std::vector<std::size_t> interior(span - 2);
  std::iota(interior.begin(), interior.end(), std::size_t{1});
  shuffle(interior, rng);
  std::vector<std::size_t> offsets{0};
  offsets.insert(offsets.end(), interior.begin(),
                 interior.begin() + static_cast<std::ptrdiff_t>(motif_length - 2));
  offsets.push_back(span - 1);
  std::sort(offsets.begin(), offsets.end());
  return offsets;
}

double motif_satisfaction(const Sequence& seq, const SpacedMotif& motif, std::size_t quantization) {
  const std::size_t l = motif.length();
  const std::size_t span = motif.span();
  if (l == 0 || span > seq.size() || quantization == 0) return 0.0;
  std::size_t best = 0;
  for (std::size_t anchor = 0; anchor + span <= seq.size(); ++anchor) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < l; ++j) {
      if (seq[anchor + motif.offsets[j]] == motif.symbols[j]) ++count;
    }
    best = std::max(best, count);
    if (best == l) break;
  }
  const std::size_t level = best * quantization / l;
  return static_cast<double>(level) / static_cast<double>(quantization);
}

bool is_feasible(const Sequence& seq, const TransitionMatrix& matrix) {
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!matrix.allowed(seq[i - 1], seq[i])) return false;
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> motif_windows(std::size_t sequence_length,
                                                               std::size_t n_motifs) {
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  if (n_motifs == 0) return windows;
  const std::size_t width = sequence_length / n_motifs;
  for (std::size_t i = 0; i < n_motifs; ++i) {
    const std::size_t start = i * width;
    const std::size_t size = (i + 1 == n_motifs) ? sequence_length - start : width;
    windows.emplace_back(start, size);
  }
  return windows;
}

namespace {

void check_config(const EhrlichConfig& c) {
  if (c.alphabet_size < 2) throw Error(ErrorCode::InfeasibleConfig, "alphabet_size must be >= 2");
  if (c.n_motifs == 0) throw Error(ErrorCode::InfeasibleConfig, "n_motifs must be >= 1");
  if (c.motif_length == 0) throw Error(ErrorCode::InfeasibleConfig, "motif_length must be >= 1");
  if (c.sequence_length / c.n_motifs < c.motif_length) {
    throw Error(ErrorCode::InfeasibleConfig,
                "sequence_length " + std::to_string(c.sequence_length) + " cannot hold " +
                    std::to_string(c.n_motifs) + " motifs of length " +
                    std::to_string(c.motif_length));
  }
  const std::size_t q = c.effective_quantization();
  if (q < 1 || q > c.motif_length) {
    throw Error(ErrorCode::InfeasibleConfig, "quantization must lie in [1, motif_length]");
  }
}

ProblemInfo make_info(const EhrlichConfig& c) {
  return ProblemInfo{c.name.empty() ? "Ehrlich(L=" + std::to_string(c.sequence_length) + ")" : c.name,
                     Alphabet::standard(c.alphabet_size), c.sequence_length, true, 1.0};
}

}  // namespace

EhrlichOracle EhrlichOracle::generate(const EhrlichConfig& config, std::uint64_t seed) {
  check_config(config);
  EhrlichOracle oracle;
  oracle.config_ = config;
  oracle.seed_ = seed;
  oracle.info_ = make_info(config);
  oracle.quantization_ = config.effective_quantization();

  Rng matrix_rng = make_rng(seed, "ehrlich/matrix");
  oracle.matrix_ = generate_transition_matrix(config.alphabet_size, config.sparsity, matrix_rng);

  Rng motif_rng = make_rng(seed, "ehrlich/motifs");
  const auto symbols = sample_motifs(oracle.matrix_, config.n_motifs, config.motif_length, motif_rng);

  Rng spacing_rng = make_rng(seed, "ehrlich/spacings");
  const auto windows = motif_windows(config.sequence_length, config.n_motifs);
  constexpr int kMaxAttempts = 16;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    oracle.motifs_.clear();
    for (std::size_t i = 0; i < config.n_motifs; ++i) {
      oracle.motifs_.push_back(
          {symbols[i], sample_spacings(config.motif_length, windows[i].second, spacing_rng)});
    }
    try {
      (void)oracle.construct_optimum();
      return oracle;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleConfig) throw;
    }
  }
  throw Error(ErrorCode::InfeasibleConfig, "no constructible optimum after retries");
}

double EhrlichOracle::score(const Sequence& seq) const {
  if (!is_feasible(seq, matrix_)) return 0.0;
  double value = 1.0;
  for (const auto& motif : motifs_) {
    value *= motif_satisfaction(seq, motif, quantization_);
    if (value == 0.0) break;
  }
  return value;
}

Sequence EhrlichOracle::construct_optimum() const {
  const std::size_t L = info_.sequence_length;
  std::vector<Token> tokens(L);
  std::vector<bool> assigned(L, false);
  const auto windows = motif_windows(L, motifs_.size());
  for (std::size_t i = 0; i < motifs_.size(); ++i) {
    const auto& motif = motifs_[i];
    if (motif.span() > windows[i].second) {
      throw Error(ErrorCode::InfeasibleConfig, "motif " + std::to_string(i) + " overflows its window");
    }
    for (std::size_t j = 0; j < motif.length(); ++j) {
      const std::size_t pos = windows[i].first + motif.offsets[j];
      tokens[pos] = motif.symbols[j];
      assigned[pos] = true;
    }
  }
  // Gaps repeat the previous motif symbol; self-transitions are always
  // allowed and consecutive motif symbols are consecutive chain draws.
  auto first = std::find(assigned.begin(), assigned.end(), true);
  if (first == assigned.end()) throw Error(ErrorCode::InfeasibleConfig, "no motif positions");
  Token fill = tokens[static_cast<std::size_t>(first - assigned.begin())];
  for (std::size_t p = 0; p < L; ++p) {
    if (assigned[p]) {
      fill = tokens[p];
    } else {
      tokens[p] = fill;
    }
  }
  Sequence seq(std::move(tokens));
  if (score(seq) != 1.0) {
    throw Error(ErrorCode::InfeasibleConfig, "constructed sequence does not reach the optimum");
  }
  return seq;
}

Sequence construct_optimum(const EhrlichOracle& oracle) { return oracle.construct_optimum(); }

nlohmann::json EhrlichOracle::to_json() const {
  nlohmann::json doc;
  doc["family"] = "ehrlich";
  doc["name"] = info_.name;
  doc["seed"] = seed_;
  doc["alphabet"] = info_.alphabet.tokens();
  doc["alphabet_size"] = config_.alphabet_size;
  doc["sequence_length"] = config_.sequence_length;
  doc["n_motifs"] = config_.n_motifs;
  doc["motif_length"] = config_.motif_length;
  doc["quantization"] = quantization_;
  doc["sparsity"] = config_.sparsity;
  doc["achieved_sparsity"] = matrix_.sparsity();
  doc["window_policy"] = "equal_contiguous";
  nlohmann::json motifs = nlohmann::json::array();
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& m : motifs_) {
    motifs.push_back(m.symbols);
    offsets.push_back(m.offsets);
  }
  doc["motifs"] = motifs;
  doc["offsets"] = offsets;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < matrix_.size(); ++i) {
    rows.push_back(std::vector<double>(matrix_.probs().begin() + static_cast<std::ptrdiff_t>(i * matrix_.size()),
                                       matrix_.probs().begin() + static_cast<std::ptrdiff_t>((i + 1) * matrix_.size())));
  }
  doc["transition_matrix"] = rows;
  return doc;
}

EhrlichOracle EhrlichOracle::from_json(const nlohmann::json& doc) {
  try {
    EhrlichOracle oracle;
    oracle.config_.alphabet_size = doc.at("alphabet_size").get<std::size_t>();
    oracle.config_.sequence_length = doc.at("sequence_length").get<std::size_t>();
    oracle.config_.n_motifs = doc.at("n_motifs").get<std::size_t>();
    oracle.config_.motif_length = doc.at("motif_length").get<std::size_t>();
    oracle.config_.quantization = doc.at("quantization").get<std::size_t>();
    oracle.config_.sparsity = doc.at("sparsity").get<double>();
    oracle.config_.name = doc.at("name").get<std::string>();
    check_config(oracle.config_);
    oracle.seed_ = doc.at("seed").get<std::uint64_t>();
    oracle.quantization_ = oracle.config_.effective_quantization();
    oracle.info_ = make_info(oracle.config_);
    oracle.info_.alphabet = Alphabet(doc.at("alphabet").get<std::vector<std::string>>());

    const std::size_t n = oracle.config_.alphabet_size;
    std::vector<double> probs;
    for (const auto& row : doc.at("transition_matrix")) {
      for (const auto& p : row) probs.push_back(p.get<double>());
    }
    oracle.matrix_ = TransitionMatrix(n, std::move(probs));

    const auto& motifs = doc.at("motifs");
    const auto& offsets = doc.at("offsets");
    if (motifs.size() != oracle.config_.n_motifs || offsets.size() != motifs.size()) {
      throw Error(ErrorCode::InfeasibleConfig, "motif count mismatch");
    }
    for (std::size_t i = 0; i < motifs.size(); ++i) {
      SpacedMotif m{motifs[i].get<std::vector<Token>>(), offsets[i].get<std::vector<std::size_t>>()};
      if (m.symbols.size() != m.offsets.size() || m.symbols.size() != oracle.config_.motif_length) {
        throw Error(ErrorCode::InfeasibleConfig, "motif " + std::to_string(i) + " is malformed");
      }
      oracle.motifs_.push_back(std::move(m));
    }
    return oracle;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed Ehrlich document: ") + e.what());
  }
}

std::vector<std::pair<Sequence, double>> sample_initial_dataset(const EhrlichOracle& oracle,
                                                                std::size_t n, Rng& rng) {
  std::vector<std::pair<Sequence, double>> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sequence seq = sample_chain(oracle.matrix(), oracle.info().sequence_length, rng);
    const double s = oracle.score(seq);
    data.emplace_back(std::move(seq), s);
  }
  return data;
}

}  // namespace seqbench::ehrlich
