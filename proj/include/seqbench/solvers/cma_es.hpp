#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "seqbench/core/rng.hpp"

namespace seqbench::solvers {

/// (mu/mu_w, lambda) covariance matrix adaptation with the default weights
/// and learning rates. Maximizes whatever values are passed to tell().
class CmaEs {
 public:
  CmaEs(Eigen::VectorXd mean, double sigma, std::size_t lambda = 0);

  static std::size_t default_lambda(std::size_t dimension);

  /// lambda samples from N(m, sigma^2 C).
  std::vector<Eigen::VectorXd> ask(Rng& rng);
  /// values[i] belongs to samples[i]; higher is better. Fewer than lambda
  /// samples are accepted (the best mu of what is given are recombined).
  void tell(const std::vector<Eigen::VectorXd>& samples, const std::vector<double>& values);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  std::size_t lambda() const noexcept { return lambda_; }
  std::size_t mu() const noexcept { return mu_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  double sigma() const noexcept { return sigma_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }
  /// Eigenvalues of the last decomposition, floored at 1e-12.
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigvals_; }
  std::size_t generation() const noexcept { return generation_; }
  /// Number of decompositions that needed eigenvalue flooring.
  std::size_t repairs() const noexcept { return repairs_; }

 private:
  void decompose();

  std::size_t lambda_;
  std::size_t mu_;
  Eigen::VectorXd weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;

  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd eigvals_;
  Eigen::MatrixXd inv_sqrt_;
  Eigen::VectorXd path_sigma_;
  Eigen::VectorXd path_c_;
  std::size_t generation_ = 0;
  std::size_t decomposed_at_ = 0;
  std::size_t repairs_ = 0;
};

}  // namespace seqbench::solvers
