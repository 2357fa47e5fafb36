#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "seqbench/core/rng.hpp"

namespace seqbench::gp {

inline constexpr double kNoiseFloor = 1e-8;
inline constexpr double kMaxJitter = 1e-4;

/// Squared-exponential kernel with one shared lengthscale.
struct Hyperparams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 1e-2;
};

/// Rows are points.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z);

/// sigma_f^2 * exp(-d^2 / (2 l^2)) applied entrywise to squared distances.
Eigen::MatrixXd kernel_from_distances(const Eigen::MatrixXd& sqdist, const Hyperparams& hyper);

/// n x m kernel between the rows of x and z. Throws DimensionMismatch.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                              const Hyperparams& hyper);

/// log l ~ Normal(location, scale). The default location 0.5*log(D) grows
/// the preferred lengthscale like sqrt(D).
struct LengthscalePrior {
  double location = 0.0;
  double scale = 1.0;

  static LengthscalePrior for_dimension(std::size_t dimension, double offset = 0.0, double scale = 1.0);
  double log_density(double log_lengthscale) const;
};

struct PosteriorBatch {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP regression conditioned on standardized targets. Immutable after
/// construction; means and variances are reported in the original units.
class GPModel {
 public:
  /// Throws NumericalError if K + noise*I cannot be factorized even after
  /// jitter escalation up to kMaxJitter.
  GPModel(Eigen::MatrixXd inputs, const Eigen::VectorXd& targets, const Hyperparams& hyper);

  /// Same model, but from a precomputed n x n matrix of squared distances
  /// between training points. predict() then needs cross distances.
  static GPModel from_distances(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets,
                                const Hyperparams& hyper);

  Posterior predict(const Eigen::VectorXd& query) const;
  PosteriorBatch predict(const Eigen::MatrixXd& queries) const;
  /// cross_sqdist is m x n: squared distances from each query to each
  /// training point.
  PosteriorBatch predict_from_distances(const Eigen::MatrixXd& cross_sqdist) const;

  /// Log marginal likelihood of the standardized targets.
  double log_marginal_likelihood() const noexcept { return lml_; }

  const Hyperparams& hyper() const noexcept { return hyper_; }
  /// Noise actually added to the diagonal (noise_variance plus any jitter).
  double effective_noise() const noexcept { return effective_noise_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(alpha_.size()); }
  double target_mean() const noexcept { return y_mean_; }
  double target_scale() const noexcept { return y_scale_; }
  const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
  const Eigen::VectorXd& standardized_targets() const noexcept { return y_std_; }
  const Eigen::MatrixXd& cholesky_factor() const noexcept { return chol_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }

 private:
  GPModel() = default;
  void condition(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets);

  Eigen::MatrixXd inputs_;
  Hyperparams hyper_;
  double effective_noise_ = 0.0;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Eigen::VectorXd y_std_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};

/// Log-space search box for the hyperparameters.
struct HyperBounds {
  double lengthscale_min = 1e-2, lengthscale_max = 1e3;
  double signal_min = 1e-4, signal_max = 1e2;
  double noise_min = kNoiseFloor, noise_max = 1.0;
};

struct FitOptions {
  int n_starts = 16;
  int max_evaluations_per_start = 120;
  HyperBounds bounds;
  std::optional<LengthscalePrior> prior;
};

struct FitResult {
  Hyperparams hyper;
  /// Log marginal likelihood plus log prior at hyper.
  double objective = 0.0;
  /// Objective at each start point, before any search.
  std::vector<double> start_objectives;
  int evaluations = 0;
};

/// Log marginal likelihood of standardized targets under hyper; -inf when
/// the kernel matrix is not positive definite.
double log_marginal_likelihood(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& standardized,
                               const Hyperparams& hyper);

/// Maximizes log marginal likelihood + log prior by multi-start bounded
/// Nelder-Mead over (log l, log sigma_f^2, log sigma_n^2). The first start
/// is the prior location (or l = 1) with unit signal and 1e-2 noise; the
/// rest are uniform in the log box.
FitResult fit_hyperparameters(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets,
                              const FitOptions& options, Rng& rng);

struct FittedGP {
  GPModel model;
  FitResult fit;
};

FittedGP fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                const FitOptions& options, Rng& rng);

/// Closed-form EI for maximization with exploration offset xi.
double expected_improvement(double mean, double variance, double best_so_far, double xi = 0.0);

double normal_pdf(double z);
double normal_cdf(double z);

nlohmann::json to_json(const Hyperparams& hyper);

}  // namespace seqbench::gp
