#include "seqbench/solvers/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "seqbench/core/error.hpp"

namespace seqbench::solvers {

namespace {
constexpr double kEigenFloor = 1e-12;
}

std::size_t CmaEs::default_lambda(std::size_t dimension) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

CmaEs::CmaEs(Eigen::VectorXd mean, double sigma, std::size_t lambda)
    : mean_(std::move(mean)), sigma_(sigma) {
  const auto n = static_cast<double>(mean_.size());
  if (mean_.size() == 0) throw Error(ErrorCode::DimensionMismatch, "CMA-ES needs dimension >= 1");
  if (!(sigma > 0)) throw Error(ErrorCode::ConfigError, "CMA-ES step size must be positive");
  lambda_ = lambda == 0 ? default_lambda(mean_.size()) : std::max<std::size_t>(lambda, 2);
  mu_ = lambda_ / 2;

  weights_.resize(static_cast<Eigen::Index>(mu_));
  for (std::size_t i = 0; i < mu_; ++i) {
    weights_[static_cast<Eigen::Index>(i)] =
        std::log(static_cast<double>(mu_) + 0.5) - std::log(static_cast<double>(i) + 1.0);
  }
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  const auto d = mean_.size();
  cov_ = Eigen::MatrixXd::Identity(d, d);
  basis_ = Eigen::MatrixXd::Identity(d, d);
  eigvals_ = Eigen::VectorXd::Ones(d);
  inv_sqrt_ = Eigen::MatrixXd::Identity(d, d);
  path_sigma_ = Eigen::VectorXd::Zero(d);
  path_c_ = Eigen::VectorXd::Zero(d);
}

std::vector<Eigen::VectorXd> CmaEs::ask(Rng& rng) {
  const auto d = mean_.size();
  const Eigen::VectorXd scale = eigvals_.cwiseSqrt();
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(lambda_);
  Eigen::VectorXd z(d);
  for (std::size_t k = 0; k < lambda_; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = standard_normal(rng);
    samples.push_back(mean_ + sigma_ * (basis_ * scale.cwiseProduct(z)));
  }
  return samples;
}

void CmaEs::tell(const std::vector<Eigen::VectorXd>& samples, const std::vector<double>& values) {
  if (samples.size() != values.size() || samples.size() < mu_) {
    throw Error(ErrorCode::DimensionMismatch, "tell() needs at least mu scored samples, got " +
                                                  std::to_string(samples.size()));
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  const auto d = mean_.size();
  const Eigen::VectorXd old_mean = mean_;
  Eigen::MatrixXd steps(d, static_cast<Eigen::Index>(mu_));
  mean_.setZero();
  for (std::size_t i = 0; i < mu_; ++i) {
    const auto& x = samples[order[i]];
    mean_ += weights_[static_cast<Eigen::Index>(i)] * x;
    steps.col(static_cast<Eigen::Index>(i)) = (x - old_mean) / sigma_;
  }
  const Eigen::VectorXd y_w = (mean_ - old_mean) / sigma_;

  path_sigma_ = (1.0 - c_sigma_) * path_sigma_ +
                std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * (inv_sqrt_ * y_w);
  ++generation_;
  const double ps_norm = path_sigma_.norm();
  const double denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * static_cast<double>(generation_)));
  const bool h_sigma = ps_norm / denom < (1.4 + 2.0 / (static_cast<double>(d) + 1.0)) * chi_n_;

  path_c_ = (1.0 - c_c_) * path_c_ +
            (h_sigma ? std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) : 0.0) * y_w;

  const double delta_h = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
  cov_ *= (1.0 - c_1_ - c_mu_ + c_1_ * delta_h);
  cov_.noalias() += c_1_ * path_c_ * path_c_.transpose();
  cov_.noalias() += c_mu_ * steps * weights_.asDiagonal() * steps.transpose();
  cov_ = 0.5 * (cov_ + cov_.transpose());

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));

  const double gap = static_cast<double>(lambda_) / (c_1_ + c_mu_) / static_cast<double>(d) / 10.0;
  if (static_cast<double>(generation_ - decomposed_at_) > gap) decompose();
}

void CmaEs::decompose() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalError, "covariance eigendecomposition failed");
  }
  basis_ = solver.eigenvectors();
  eigvals_ = solver.eigenvalues();
  if (eigvals_.minCoeff() <= kEigenFloor) {
    ++repairs_;
    eigvals_ = eigvals_.cwiseMax(kEigenFloor);
    cov_ = basis_ * eigvals_.asDiagonal() * basis_.transpose();
  }
  inv_sqrt_ = basis_ * eigvals_.cwiseSqrt().cwiseInverse().asDiagonal() * basis_.transpose();
  decomposed_at_ = generation_;
}

}  // namespace seqbench::solvers
