#include "bcgp/quadrature.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "bcgp/errors.hpp"

namespace bcgp {

GaussHermiteRule gauss_hermite(int k) {
  if (k < 1) throw ArgumentError("Gauss-Hermite rule needs k >= 1");
  // Golub-Welsch eigenvalues as starting points, then Newton polishing on the
  // orthonormal Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i < k; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(0.5 * i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

  const double pim4 = std::pow(std::numbers::pi, -0.25);
  GaussHermiteRule rule{Eigen::VectorXd(k), Eigen::VectorXd(k)};
  for (int i = 0; i < k; ++i) {
    double z = eig.eigenvalues()[i];
    double pp = 0.0;
    for (int iter = 0; iter < 10; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= k; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0 * k) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  // Enforce the exact symmetry of the rule.
  for (int i = 0; i < k / 2; ++i) {
    const int j = k - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (k % 2 == 1) rule.nodes[k / 2] = 0.0;
  return rule;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal(), p);
}

double central_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("interval level must lie in (0, 1)");
  return normal_quantile(0.5 * (1.0 + level));
}

double normal_log_pdf(double x, double mean, double variance) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + r * r / variance);
}

}  // namespace bcgp
