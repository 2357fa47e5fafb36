#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqbench/core/black_box.hpp"
#include "seqbench/core/problem.hpp"
#include "seqbench/core/rng.hpp"

namespace seqbench::solvers {

struct SolverRunConfig {
  std::uint64_t seed = 0;
  /// Upper bound on solver evaluations; the handle's own budget also applies.
  std::size_t budget = 300;
  InitialData init_data;
  /// Family initializer used for padding populations and restarts. Uniform
  /// random sequences when empty.
  SequenceSampler sampler;
};

struct Incumbent {
  Sequence sequence;
  double score = 0.0;
};

struct SolveResult {
  Incumbent incumbent;
  /// Best-so-far after each solver evaluation (init data included in the max).
  std::vector<double> trajectory;
  std::size_t calls = 0;
  /// Recoverable incidents, e.g. a GP fit that fell back to a random step.
  std::vector<std::string> notes;
};

class Solver {
 public:
  virtual ~Solver() = default;
  /// Registry name, e.g. "directed_evolution".
  virtual std::string name() const = 0;
  /// Every hyperparameter with its effective value.
  virtual nlohmann::json hyperparameters() const = 0;
  virtual SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) = 0;
};

/// Throws ConfigError for unknown names or unknown/invalid parameters.
std::unique_ptr<Solver> make_solver(const std::string& name, const nlohmann::json& params = {});
std::vector<std::string> solver_names();
/// Row label used in result tables, e.g. "DirectedEvolution".
std::string display_name(const std::string& solver_name);

/// Book-keeping shared by every solver: budget truncation, the global
/// incumbent and the best-so-far trajectory.
class Campaign {
 public:
  Campaign(BlackBoxHandle& handle, const SolverRunConfig& config);

  std::size_t remaining() const noexcept;
  bool done() const noexcept { return remaining() == 0; }

  /// Evaluates the longest prefix of batch that fits the budget. Returns one
  /// score per evaluated sequence.
  std::vector<double> evaluate(std::span<const Sequence> batch);
  /// nullopt once the budget is gone.
  std::optional<double> evaluate(const Sequence& seq);

  bool has_incumbent() const noexcept { return has_incumbent_; }
  const Incumbent& incumbent() const noexcept { return incumbent_; }
  void note(std::string message) { result_.notes.push_back(std::move(message)); }

  /// Best init point, or a fresh sample when there is no init data.
  Incumbent initial_incumbent(Rng& rng);
  Sequence sample(Rng& rng) const;

  const ProblemInfo& info() const noexcept { return handle_.info(); }
  SolveResult finish();

 private:
  void record(const Sequence& seq, double score);

  BlackBoxHandle& handle_;
  const SolverRunConfig& config_;
  std::size_t used_ = 0;
  bool has_incumbent_ = false;
  Incumbent incumbent_;
  SolveResult result_;
};

/// Changes one uniformly chosen position to a uniformly chosen different token.
Sequence mutate_one(const Sequence& seq, std::size_t alphabet_size, Rng& rng);

Sequence uniform_sequence(std::size_t length, std::size_t alphabet_size, Rng& rng);

}  // namespace seqbench::solvers
