#include "seqbench/gp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "seqbench/core/error.hpp"
#include "seqbench/gp/nelder_mead.hpp"

namespace seqbench::gp {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

void standardize(const Eigen::VectorXd& y, double& mean, double& scale, Eigen::VectorXd& out) {
  const auto n = y.size();
  mean = n > 0 ? y.mean() : 0.0;
  scale = 1.0;
  if (n >= 2) {
    const double var = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
    if (var > 0.0) scale = std::sqrt(var);
  }
  out = (y.array() - mean) / scale;
}

/// Lower factor of K + noise*I, or nullopt if not positive definite.
std::optional<Eigen::LLT<Eigen::MatrixXd>> factorize(Eigen::MatrixXd k, double noise) {
  k.diagonal().array() += noise;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return llt;
}

/// Repeated LML evaluation on fixed distances. Hamming-type inputs take few
/// distinct distance values, so the kernel is filled from a per-call table.
class LmlWorkspace {
 public:
  LmlWorkspace(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& y) : sqdist_(sqdist), y_(y) {
    const auto n = sqdist.rows();
    codes_.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = j; i < n; ++i) {
        const double d = sqdist(i, j);
        auto it = std::find(distinct_.begin(), distinct_.end(), d);
        if (it == distinct_.end()) {
          if (distinct_.size() >= kMaxDistinct) {
            distinct_.clear();
            return;
          }
          distinct_.push_back(d);
          it = distinct_.end() - 1;
        }
        codes_(i, j) = static_cast<int>(it - distinct_.begin());
      }
    }
    table_.resize(distinct_.size());
  }

  double operator()(const Hyperparams& hyper) {
    const auto n = sqdist_.rows();
    const double inv = -0.5 / (hyper.lengthscale * hyper.lengthscale);
    k_.resize(n, n);
    if (!distinct_.empty()) {
      for (std::size_t c = 0; c < distinct_.size(); ++c) table_[c] = hyper.signal_variance * std::exp(distinct_[c] * inv);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) k_(i, j) = table_[static_cast<std::size_t>(codes_(i, j))];
      }
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) k_(i, j) = hyper.signal_variance * std::exp(sqdist_(i, j) * inv);
      }
    }
    k_.diagonal().array() += std::max(hyper.noise_variance, kNoiseFloor);
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(k_);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    alpha_ = llt.solve(y_);
    return -0.5 * y_.dot(alpha_) - k_.diagonal().array().log().sum() -
           0.5 * static_cast<double>(n) * kLog2Pi;
  }

 private:
  static constexpr std::size_t kMaxDistinct = 4096;
  const Eigen::MatrixXd& sqdist_;
  const Eigen::VectorXd& y_;
  Eigen::MatrixXi codes_;
  std::vector<double> distinct_;
  std::vector<double> table_;
  Eigen::MatrixXd k_;
  Eigen::VectorXd alpha_;
};

}  // namespace

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
  if (x.cols() != z.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "inputs have " + std::to_string(x.cols()) + " and " +
                                                  std::to_string(z.cols()) + " columns");
  }
  Eigen::MatrixXd d = -2.0 * (x * z.transpose());
  d.colwise() += x.rowwise().squaredNorm();
  d.rowwise() += z.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

Eigen::MatrixXd kernel_from_distances(const Eigen::MatrixXd& sqdist, const Hyperparams& hyper) {
  const double inv = -0.5 / (hyper.lengthscale * hyper.lengthscale);
  return hyper.signal_variance * (sqdist.array() * inv).exp().matrix();
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                              const Hyperparams& hyper) {
  return kernel_from_distances(squared_distances(x, z), hyper);
}

LengthscalePrior LengthscalePrior::for_dimension(std::size_t dimension, double offset, double scale) {
  return {0.5 * std::log(static_cast<double>(std::max<std::size_t>(dimension, 1))) + offset, scale};
}

double LengthscalePrior::log_density(double log_lengthscale) const {
  const double z = (log_lengthscale - location) / scale;
  return -0.5 * z * z - std::log(scale) - 0.5 * kLog2Pi;
}

GPModel::GPModel(Eigen::MatrixXd inputs, const Eigen::VectorXd& targets, const Hyperparams& hyper)
    : inputs_(std::move(inputs)), hyper_(hyper) {
  if (inputs_.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inputs and targets disagree on N");
  }
  condition(squared_distances(inputs_, inputs_), targets);
}

GPModel GPModel::from_distances(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets,
                                const Hyperparams& hyper) {
  if (sqdist.rows() != sqdist.cols() || sqdist.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distance matrix must be N x N");
  }
  GPModel model;
  model.hyper_ = hyper;
  model.condition(sqdist, targets);
  return model;
}

void GPModel::condition(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets) {
  if (targets.size() == 0) throw Error(ErrorCode::DimensionMismatch, "no training data");
  if (!(hyper_.lengthscale > 0 && hyper_.signal_variance > 0 && hyper_.noise_variance > 0)) {
    throw Error(ErrorCode::NumericalError, "hyperparameters must be strictly positive");
  }
  standardize(targets, y_mean_, y_scale_, y_std_);
  const Eigen::MatrixXd k = kernel_from_distances(sqdist, hyper_);

  double noise = std::max(hyper_.noise_variance, kNoiseFloor);
  auto llt = factorize(k, noise);
  for (double jitter = kNoiseFloor; !llt && jitter <= kMaxJitter * (1 + 1e-12); jitter *= 10.0) {
    noise = std::max(hyper_.noise_variance, kNoiseFloor) + jitter;
    llt = factorize(k, noise);
  }
  if (!llt) {
    throw Error(ErrorCode::NumericalError, "kernel matrix not positive definite after jitter");
  }
  effective_noise_ = noise;
  chol_ = llt->matrixL();
  alpha_ = llt->solve(y_std_);
  const double n = static_cast<double>(y_std_.size());
  lml_ = -0.5 * y_std_.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

Posterior GPModel::predict(const Eigen::VectorXd& query) const {
  const auto batch = predict(Eigen::MatrixXd(query.transpose()));
  return {batch.mean[0], batch.variance[0]};
}

PosteriorBatch GPModel::predict(const Eigen::MatrixXd& queries) const {
  if (inputs_.size() == 0 && size() > 0) {
    throw Error(ErrorCode::DimensionMismatch, "model was built from distances; use predict_from_distances");
  }
  return predict_from_distances(squared_distances(queries, inputs_));
}

PosteriorBatch GPModel::predict_from_distances(const Eigen::MatrixXd& cross_sqdist) const {
  if (static_cast<std::size_t>(cross_sqdist.cols()) != size()) {
    throw Error(ErrorCode::DimensionMismatch, "cross distances must have N columns");
  }
  const Eigen::MatrixXd k_star = kernel_from_distances(cross_sqdist, hyper_);  // m x N
  PosteriorBatch out;
  out.mean = (k_star * alpha_).array() * y_scale_ + y_mean_;
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(k_star.transpose());  // N x m
  out.variance = ((hyper_.signal_variance - v.colwise().squaredNorm().transpose().array())
                      .cwiseMax(0.0) *
                  (y_scale_ * y_scale_))
                     .matrix();
  return out;
}

double log_marginal_likelihood(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& standardized,
                               const Hyperparams& hyper) {
  auto llt = factorize(kernel_from_distances(sqdist, hyper), std::max(hyper.noise_variance, kNoiseFloor));
  if (!llt) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt->solve(standardized);
  const Eigen::MatrixXd l = llt->matrixL();
  const double n = static_cast<double>(standardized.size());
  return -0.5 * standardized.dot(alpha) - l.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

FitResult fit_hyperparameters(const Eigen::MatrixXd& sqdist, const Eigen::VectorXd& targets,
                              const FitOptions& options, Rng& rng) {
  double mean = 0.0, scale = 1.0;
  Eigen::VectorXd y;
  standardize(targets, mean, scale, y);

  const auto& b = options.bounds;
  const std::vector<double> lower{std::log(b.lengthscale_min), std::log(b.signal_min), std::log(b.noise_min)};
  const std::vector<double> upper{std::log(b.lengthscale_max), std::log(b.signal_max), std::log(b.noise_max)};
  auto unpack = [](const std::vector<double>& p) {
    return Hyperparams{std::exp(p[0]), std::exp(p[1]), std::exp(p[2])};
  };
  LmlWorkspace lml(sqdist, y);
  auto objective = [&](const std::vector<double>& p) {
    double value = lml(unpack(p));
    if (options.prior) value += options.prior->log_density(p[0]);
    return value;
  };

  FitResult result;
  result.objective = -std::numeric_limits<double>::infinity();
  const int n_starts = std::max(1, options.n_starts);
  for (int s = 0; s < n_starts; ++s) {
    std::vector<double> start(3);
    if (s == 0) {
      start = {options.prior ? options.prior->location : 0.0, 0.0, std::log(1e-2)};
    } else {
      for (std::size_t i = 0; i < 3; ++i) start[i] = lower[i] + uniform01(rng) * (upper[i] - lower[i]);
    }
    for (std::size_t i = 0; i < 3; ++i) start[i] = std::clamp(start[i], lower[i], upper[i]);
    result.start_objectives.push_back(objective(start));

    NelderMeadOptions nm;
    nm.max_evaluations = options.max_evaluations_per_start;
    nm.tolerance = 1e-7;
    const auto found = nelder_mead([&](const std::vector<double>& p) { return -objective(p); }, start,
                                   lower, upper, nm);
    result.evaluations += found.evaluations;
    if (-found.value > result.objective) {
      result.objective = -found.value;
      result.hyper = unpack(found.x);
    }
  }
  if (!std::isfinite(result.objective)) {
    throw Error(ErrorCode::NumericalError, "no start produced a finite objective");
  }
  return result;
}

FittedGP fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                const FitOptions& options, Rng& rng) {
  if (inputs.rows() < 2) throw Error(ErrorCode::NumericalError, "need at least 2 points to fit");
  const Eigen::MatrixXd sqdist = squared_distances(inputs, inputs);
  FitResult fit = fit_hyperparameters(sqdist, targets, options, rng);
  return {GPModel(inputs, targets, fit.hyper), std::move(fit)};
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double variance, double best_so_far, double xi) {
  const double s = std::sqrt(std::max(variance, 0.0));
  const double gap = mean - best_so_far - xi;
  if (s == 0.0) return std::max(gap, 0.0);
  const double z = gap / s;
  return std::max(gap * normal_cdf(z) + s * normal_pdf(z), 0.0);
}

nlohmann::json to_json(const Hyperparams& hyper) {
  return {{"lengthscale", hyper.lengthscale},
          {"signal_variance", hyper.signal_variance},
          {"noise_variance", hyper.noise_variance}};
}

}  // namespace seqbench::gp
