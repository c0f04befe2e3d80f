#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bcgp/gp.hpp"
#include "bcgp/kernel.hpp"
#include "bcgp/quadrature.hpp"
#include "bcgp/warping.hpp"

namespace bcgp {

struct PredictOptions {
  /// Central interval probability, e.g. 0.95 for the 2.5%/97.5% band.
  double level = 0.95;
  int gh_points = 20;
  /// Add the white-noise variance to the latent marginal, i.e. predict a new
  /// observation rather than the noise-free process.
  bool include_noise = true;
};

struct PredictiveSummary {
  Eigen::VectorXd inputs;
  Eigen::VectorXd median;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::optional<double>> mode;
  Eigen::VectorXd gh_mean;
  Eigen::VectorXd gh_var;
  /// Latent Gaussian marginal that the summaries above were pushed through.
  Eigen::VectorXd latent_mean;
  Eigen::VectorXd latent_sd;
  double level = 0.95;
  int gh_points = 20;
};

/// E[h(y)] for y = warping^{-1}(x), x ~ N(mean, sd^2), with the given rule:
/// (1/sqrt(pi)) sum_i w_i h(warping^{-1}(sqrt(2) sd x_i + mean)).
/// A node whose inverse fails raises RangeError naming the node.
double gh_expectation(const Warping& w, double mean, double sd,
                      const std::function<double(double)>& h, const GaussHermiteRule& rule);

/// Closed-form mode of y = warping^{-1}(x), x ~ N(mean, variance), for
/// warpings with at most one Box-Cox stage (any number of affine stages on
/// either side). Empty for other compositions or when the formula has no
/// real positive solution.
std::optional<double> warped_mode(const Warping& w, double mean, double variance);

/// Inverts `w` at x by safeguarded Newton-Raphson on a doubling bracket.
/// Returns y with |w.forward(y) - x| <= tol; throws NumericError (carrying the
/// residual) after max_iter iterations. Benchmark/oracle counterpart of
/// Warping::inverse.
double invert_numeric(const Warping& w, double x, double tol = 1e-10, int max_iter = 200);

/// Warped Gaussian process: phi(y) follows a GP with the given mean and
/// kernel. All expensive work (warping the data, factorising the Gram) is
/// done in the constructor; afterwards the model is immutable.
class WarpedGpModel {
 public:
  WarpedGpModel(Warping warping, MeanFunction mean, Kernel kernel, Eigen::VectorXd t,
                Eigen::VectorXd y);

  const Warping& warping() const noexcept { return warping_; }
  const MeanFunction& mean_function() const noexcept { return base_.mean_function(); }
  const Kernel& kernel() const noexcept { return base_.kernel(); }
  const Eigen::VectorXd& inputs() const noexcept { return t_; }
  const Eigen::VectorXd& observations() const noexcept { return y_; }
  /// phi(y) for the training observations.
  const Eigen::VectorXd& latent_observations() const noexcept { return x_; }
  const ConditionedGp& base() const noexcept { return base_; }

  /// Gaussian NLL of phi(y) minus sum_i log |phi'(y_i)|.
  double nll() const;

  PredictiveSummary predict(const Eigen::VectorXd& t_test, const PredictOptions& opts = {}) const;

  /// log p(y_i | training data) at each test pair: the warped-Gaussian
  /// marginal including observation noise.
  Eigen::VectorXd predictive_log_density(const Eigen::VectorXd& t_test,
                                         const Eigen::VectorXd& y_test) const;
  double predictive_log_density(double t, double y) const;

  /// Row p is path p: warping^{-1} applied to a joint posterior draw at
  /// t_test. With `include_noise`, white noise is added to the latent draw.
  Eigen::MatrixXd sample_paths(const Eigen::VectorXd& t_test, Eigen::Index n_paths,
                               std::uint64_t seed, bool include_noise = true) const;

 private:
  static Eigen::VectorXd warp_all(const Warping& w, const Eigen::VectorXd& y, double& lad_sum);

  Warping warping_;
  Eigen::VectorXd t_;
  Eigen::VectorXd y_;
  double log_jacobian_ = 0.0;  // sum_i log |phi'(y_i)|, set while warping y
  Eigen::VectorXd x_;
  ConditionedGp base_;
};

}  // namespace bcgp
