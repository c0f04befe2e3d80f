#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

namespace bcgp {

/// k(tau) = variance * exp(-tau^2 / (2 lengthscale^2))
struct SquaredExponential {
  double variance = 1.0;
  double lengthscale = 1.0;
};

/// One Gaussian bump of a spectral mixture: weight w, mean frequency mu and
/// spectral variance v (frequency units, i.e. cycles per input unit).
struct SpectralComponent {
  double weight = 1.0;
  double mean_frequency = 0.0;
  double variance = 1.0;
};

/// k(tau) = sum_q w_q exp(-2 pi^2 tau^2 v_q) cos(2 pi mu_q tau)
struct SpectralMixture {
  std::vector<SpectralComponent> components;
};

/// Observation noise; contributes only to the diagonal of a training Gram.
struct WhiteNoise {
  double variance = 0.0;
};

using KernelTerm = std::variant<SquaredExponential, SpectralMixture, WhiteNoise>;

/// Sum of stationary kernel terms over scalar inputs.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(KernelTerm term);
  explicit Kernel(std::vector<KernelTerm> terms);

  Kernel operator+(const Kernel& other) const;

  /// Covariance at lag tau, excluding white noise.
  double operator()(double tau) const;
  /// Sum of all white-noise variances.
  double noise_variance() const noexcept;
  /// k(0) without noise.
  double signal_variance() const { return (*this)(0.0); }

  const std::vector<KernelTerm>& terms() const noexcept { return terms_; }

 private:
  std::vector<KernelTerm> terms_;
};

class MeanFunction {
 public:
  /// Zero mean.
  MeanFunction() = default;
  static MeanFunction zero() { return {}; }
  static MeanFunction constant(double c);

  double operator()(double /*t*/) const noexcept { return value_; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& t) const;

  bool is_constant() const noexcept { return constant_; }
  double value() const noexcept { return value_; }

 private:
  bool constant_ = false;
  double value_ = 0.0;
};

/// Cross-covariance K(t, s); white noise never contributes.
Eigen::MatrixXd gram(const Kernel& k, const Eigen::VectorXd& t, const Eigen::VectorXd& s);

/// Square training Gram K(t, t) with white noise added on the diagonal.
Eigen::MatrixXd gram(const Kernel& k, const Eigen::VectorXd& t);

}  // namespace bcgp
