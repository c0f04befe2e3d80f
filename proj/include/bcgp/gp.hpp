#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bcgp/kernel.hpp"

namespace bcgp {

/// Lower Cholesky factor of a covariance matrix plus the jitter that was
/// needed to obtain it.
class CholeskyFactor {
 public:
  /// Tries the plain matrix first, then adds 1e-10 * mean(diag) to the
  /// diagonal, escalating by 10x up to 1e-4 * mean(diag). Throws
  /// ConditioningError listing every attempted jitter level.
  explicit CholeskyFactor(const Eigen::MatrixXd& cov);

  const Eigen::MatrixXd& lower() const noexcept { return lower_; }
  double jitter() const noexcept { return jitter_; }
  Eigen::Index size() const noexcept { return lower_.rows(); }

  double log_det() const;
  /// L^{-1} b
  Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& b) const;
  /// (L L^T)^{-1} b
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

/// Negative log-likelihood of x ~ N(m(t), K(t,t) + noise), via Cholesky.
double nll_gaussian(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t,
                    const Eigen::VectorXd& x);

/// Latent (noise-free) posterior at a set of test inputs.
struct GaussianPosterior {
  Eigen::VectorXd inputs;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Latent posterior mean and variance, test point by test point.
struct PosteriorMarginals {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// A GP conditioned on training data. The training Gram is factorised once;
/// the object is immutable afterwards and can be queried concurrently.
class ConditionedGp {
 public:
  ConditionedGp(MeanFunction m, Kernel k, Eigen::VectorXd t_train, Eigen::VectorXd x_train);

  const MeanFunction& mean_function() const noexcept { return mean_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  Eigen::Index train_size() const noexcept { return t_train_.size(); }

  /// Gaussian NLL of the training targets.
  double nll() const;
  GaussianPosterior joint(const Eigen::VectorXd& t_test) const;
  PosteriorMarginals marginals(const Eigen::VectorXd& t_test) const;

 private:
  MeanFunction mean_;
  Kernel kernel_;
  Eigen::VectorXd t_train_;
  Eigen::VectorXd x_train_;
  std::optional<CholeskyFactor> chol_;  // empty when there is no training data
  Eigen::VectorXd alpha_;             // K^{-1} (x - m)
};

GaussianPosterior posterior(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t_train,
                            const Eigen::VectorXd& x_train, const Eigen::VectorXd& t_test);

/// One draw m(t) + L z from the prior, Gram including white noise.
Eigen::VectorXd sample_prior(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t,
                             std::uint64_t seed);

/// `n` draws of N(mean, cov); row i is draw i. Normals are consumed draw by
/// draw, coordinate by coordinate.
Eigen::MatrixXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                Eigen::Index n, std::uint64_t seed);

}  // namespace bcgp
