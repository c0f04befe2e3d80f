#pragma once

#include <Eigen/Dense>

namespace bcgp {

/// k-point Gauss-Hermite rule for the weight exp(-x^2): sum_i w_i f(x_i)
/// approximates the integral of exp(-x^2) f(x), exactly for polynomials of
/// degree <= 2k - 1. Nodes are ascending; the weights sum to sqrt(pi).
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussHermiteRule gauss_hermite(int k);

/// Standard normal quantile.
double normal_quantile(double p);

/// Two-sided z value for a central interval of probability `level`,
/// e.g. 0.95 -> 1.959963984540054.
double central_z(double level);

double normal_log_pdf(double x, double mean, double variance);

}  // namespace bcgp
