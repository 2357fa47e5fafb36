#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "seqbench/gp/gp.hpp"
#include "seqbench/solvers/solver.hpp"

namespace seqbench::solvers {

using SequenceSet = std::unordered_set<Sequence, SequenceHash>;

/// Squared Euclidean distances between one-hot encodings, computed as
/// 2 * Hamming distance. Rows index a, columns index b.
Eigen::MatrixXd one_hot_sqdist(std::span<const Sequence> a, std::span<const Sequence> b);

struct CandidatePoolSpec {
  std::size_t count = 512;
  /// Uniform random sequences among count; the rest are mutations.
  std::size_t n_random = 64;
  /// Mutations change between 1 and mutation_radius positions.
  std::size_t mutation_radius = 2;
};

struct CandidatePool {
  std::vector<Sequence> sequences;
  /// True when no unevaluated sequence could be produced at all.
  bool exhausted = false;
};

/// Mutations of the given incumbents (round robin) plus uniform random
/// sequences, deduplicated against `evaluated` and each other. Short pools
/// are back-filled; tiny search spaces are enumerated.
CandidatePool propose_candidates(std::span<const Sequence> incumbents, Rng& rng,
                                 const CandidatePoolSpec& spec, std::size_t alphabet_size,
                                 std::size_t sequence_length, const SequenceSet& evaluated);

/// Observations collected by a GP solver, with the pairwise one-hot distance
/// matrix kept up to date incrementally.
class Observations {
 public:
  void add(const Sequence& seq, double score);
  std::size_t size() const noexcept { return sequences_.size(); }
  const std::vector<Sequence>& sequences() const noexcept { return sequences_; }
  const std::vector<double>& scores() const noexcept { return scores_; }
  const Eigen::MatrixXd& sqdist() const noexcept { return sqdist_; }
  const SequenceSet& seen() const noexcept { return seen_; }
  bool contains(const Sequence& seq) const { return seen_.count(seq) > 0; }
  double best_score() const;
  /// Indices of the k best observations, best first, ties by insertion order.
  std::vector<std::size_t> top(std::size_t k) const;

 private:
  std::vector<Sequence> sequences_;
  std::vector<double> scores_;
  Eigen::MatrixXd sqdist_;
  SequenceSet seen_;
};

/// Indices used for hyperparameter fitting when N exceeds max_points:
/// the best half by score plus a uniform sample of the rest, ascending.
std::vector<std::size_t> select_fit_subset(std::span<const double> scores, std::size_t max_points, Rng& rng);

struct GpSettings {
  int n_starts = 16;
  int max_evaluations_per_start = 120;
  /// Hyperparameters are fit on at most this many observations; the
  /// posterior always conditions on all of them.
  std::size_t max_fit_points = 128;
  double prior_offset = 0.0;
  double prior_scale = 1.0;
  double xi = 0.0;

  nlohmann::json to_json() const;
};

struct VanillaBoParams {
  CandidatePoolSpec pool;
  std::size_t n_incumbents = 8;
  GpSettings gp;
};

/// GP-EI over one-hot space with a lengthscale prior centred at sqrt(D).
class VanillaBo final : public Solver {
 public:
  explicit VanillaBo(VanillaBoParams params = {}) : params_(params) {}
  std::string name() const override { return "vanilla_bo"; }
  nlohmann::json hyperparameters() const override;
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  VanillaBoParams params_;
};

struct TrustRegionState {
  double length = 0.8;
  double length_min = 0.0078125;  // 0.5^7
  double length_max = 1.6;
  std::size_t success_count = 0;
  std::size_t failure_count = 0;
  std::size_t success_tolerance = 3;
  std::size_t failure_tolerance = 4;
  bool restart_required = false;
};

/// Counts a success or failure; doubles (capped) after success_tolerance
/// successes, halves after failure_tolerance failures, and flags a restart
/// once the side drops below length_min.
TrustRegionState turbo_update(TrustRegionState state, bool improved);

struct TurboParams {
  std::size_t pool_size = 512;
  double length_init = 0.8;
  double length_min = 0.0078125;
  double length_max = 1.6;
  std::size_t success_tolerance = 3;
  /// 0 selects max(4, D), the default for one evaluation per step.
  std::size_t failure_tolerance = 0;
  std::size_t restart_samples = 10;
  GpSettings gp;
};

/// Candidates for a trust region of side `length` around a one-hot center:
/// a random subset of coordinates (each with probability min(1, 20/D), at
/// least one) is redrawn uniformly from [c - length, c + length] clipped to
/// [0,1]; the rest stay at the center.
Eigen::VectorXd trust_region_sample(const Eigen::VectorXd& center, double length, Rng& rng);

class Turbo final : public Solver {
 public:
  explicit Turbo(TurboParams params = {}) : params_(params) {}
  std::string name() const override { return "turbo"; }
  nlohmann::json hyperparameters() const override;
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  TurboParams params_;
};

struct RandomLineBoParams {
  std::size_t steps_per_line = 10;
  std::size_t grid_size = 201;
  int n_starts = 4;
  double xi = 0.0;
};

/// Point on the line through x along unit direction d at parameter t in
/// [-1, 1]; the line is scaled by sqrt(D) so that it spans the unit box.
Eigen::VectorXd line_point(const Eigen::VectorXd& x, const Eigen::VectorXd& direction, double t);

class RandomLineBo final : public Solver {
 public:
  explicit RandomLineBo(RandomLineBoParams params = {}) : params_(params) {}
  std::string name() const override { return "random_line_bo"; }
  nlohmann::json hyperparameters() const override;
  SolveResult solve(BlackBoxHandle& handle, const SolverRunConfig& config) override;

 private:
  RandomLineBoParams params_;
};

}  // namespace seqbench::solvers
