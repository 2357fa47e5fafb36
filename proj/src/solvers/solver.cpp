#include "seqbench/solvers/solver.hpp"

#include <algorithm>

#include "seqbench/core/error.hpp"

namespace seqbench::solvers {

Campaign::Campaign(BlackBoxHandle& handle, const SolverRunConfig& config)
    : handle_(handle), config_(config) {
  for (const auto& [seq, score] : config.init_data) {
    if (!has_incumbent_ || score > incumbent_.score) {
      incumbent_ = {seq, score};
      has_incumbent_ = true;
    }
  }
}

std::size_t Campaign::remaining() const noexcept {
  const std::size_t own = config_.budget > used_ ? config_.budget - used_ : 0;
  return std::min(own, handle_.remaining_budget());
}

void Campaign::record(const Sequence& seq, double score) {
  if (!has_incumbent_ || score > incumbent_.score) {
    incumbent_ = {seq, score};
    has_incumbent_ = true;
  }
  result_.trajectory.push_back(incumbent_.score);
}

std::vector<double> Campaign::evaluate(std::span<const Sequence> batch) {
  const std::size_t n = std::min(batch.size(), remaining());
  if (n == 0) return {};
  std::vector<double> scores;
  try {
    scores = handle_.evaluate(batch.first(n));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExhausted) throw;
    used_ = config_.budget;
    return {};
  }
  used_ += n;
  for (std::size_t i = 0; i < n; ++i) record(batch[i], scores[i]);
  return scores;
}

std::optional<double> Campaign::evaluate(const Sequence& seq) {
  const auto scores = evaluate(std::span<const Sequence>(&seq, 1));
  if (scores.empty()) return std::nullopt;
  return scores.front();
}

Sequence Campaign::sample(Rng& rng) const {
  if (config_.sampler) return config_.sampler(rng);
  return uniform_sequence(info().sequence_length, info().alphabet.size(), rng);
}

Incumbent Campaign::initial_incumbent(Rng& rng) {
  if (has_incumbent_) return incumbent_;
  Sequence seq = sample(rng);
  const auto score = evaluate(seq);
  return {seq, score.value_or(0.0)};
}

SolveResult Campaign::finish() {
  result_.incumbent = incumbent_;
  result_.calls = used_;
  return std::move(result_);
}

Sequence mutate_one(const Sequence& seq, std::size_t alphabet_size, Rng& rng) {
  Sequence out = seq;
  if (out.empty() || alphabet_size < 2) return out;
  const auto pos = uniform_index(rng, out.size());
  auto token = static_cast<Token>(uniform_index(rng, alphabet_size - 1));
  if (token >= out[pos]) ++token;
  out[pos] = token;
  return out;
}

Sequence uniform_sequence(std::size_t length, std::size_t alphabet_size, Rng& rng) {
  std::vector<Token> tokens(length);
  for (auto& t : tokens) t = static_cast<Token>(uniform_index(rng, alphabet_size));
  return Sequence(std::move(tokens));
}

}  // namespace seqbench::solvers
