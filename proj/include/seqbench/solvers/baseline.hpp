#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "seqbench/solvers/solver.hpp"

namespace seqbench::solvers {

/// Greedy single-site mutation of the incumbent; strict improvements only.
class DirectedEvolution final : public Solver {
 public:
  std::string name() const override { return "directed_evolution"; }
  nlohmann::json hyperparameters() const override { return nlohmann::json::object(); }
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;
};

/// Gaussian steps on a continuous one-hot incumbent, clipped to the unit box.
class HillClimbing final : public Solver {
 public:
  explicit HillClimbing(double step_sigma = 0.25) : step_sigma_(step_sigma) {}
  std::string name() const override { return "hill_climbing"; }
  nlohmann::json hyperparameters() const override { return {{"step_sigma", step_sigma_}}; }
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  double step_sigma_;
};

struct GeneticAlgorithmParams {
  std::size_t population_size = 20;
  std::size_t tournament_k = 3;
  /// Negative selects 1/L.
  double mutation_rate = -1.0;
};

class GeneticAlgorithm final : public Solver {
 public:
  explicit GeneticAlgorithm(GeneticAlgorithmParams params = {});
  std::string name() const override { return "genetic_algorithm"; }
  nlohmann::json hyperparameters() const override;
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  GeneticAlgorithmParams params_;
};

/// Index of the best of k uniformly drawn (with replacement) competitors;
/// ties go to the earliest draw.
std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng);

/// Per-position fair coin between the two parents.
Sequence uniform_crossover(const Sequence& a, const Sequence& b, Rng& rng);

/// Each position is resampled to a different token with probability rate.
Sequence mutate_positions(const Sequence& seq, double rate, std::size_t alphabet_size, Rng& rng);

struct CmaEsParams {
  /// 0 selects 4 + floor(3 ln D).
  std::size_t population_lambda = 0;
  double initial_sigma = 0.3;
};

/// CMA-ES in the one-hot box: samples are clipped and decoded for
/// evaluation, the update uses the unclipped samples.
class CmaEsSolver final : public Solver {
 public:
  explicit CmaEsSolver(CmaEsParams params = {}) : params_(params) {}
  std::string name() const override { return "cma_es"; }
  nlohmann::json hyperparameters() const override;
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  CmaEsParams params_;
};

}  // namespace seqbench::solvers
