#include "bcgp/wgp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double gh_expectation(const Warping& w, double mean, double sd,
                      const std::function<double(double)>& h, const GaussHermiteRule& rule) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double x = std::numbers::sqrt2 * sd * rule.nodes[i] + mean;
    double y;
    try {
      y = w.inverse(x);
    } catch (const Error& e) {
      throw RangeError("Gauss-Hermite node " + std::to_string(i) + " (x = " + describe(x) +
                       ") lies outside the inverse warping's domain: " + e.what());
    }
    sum += rule.weights[i] * h(y);
  }
  const double result = sum / std::sqrt(std::numbers::pi);
  if (!std::isfinite(result)) {
    throw RangeError("Gauss-Hermite expectation is not finite (mean " + describe(mean) + ", sd " +
                     describe(sd) + ")");
  }
  return result;
}

std::optional<double> warped_mode(const Warping& w, double mean, double variance) {
  const auto& stages = w.stages();
  std::size_t box_index = stages.size();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (std::holds_alternative<BoxCox>(stages[i])) {
      if (box_index != stages.size()) return std::nullopt;
      box_index = i;
    }
  }
  // Gaussian latent pushed through affine maps only: the mode maps directly.
  if (box_index == stages.size()) return w.inverse(mean);

  // Collapse the affine stages after the Box-Cox stage, x = A + B v, so that
  // v = BoxCox(z) ~ N((m - A) / B, k / B^2).
  double post_shift = 0.0;
  double post_scale = 1.0;
  for (std::size_t i = box_index + 1; i < stages.size(); ++i) {
    const auto& a = std::get<Affine>(stages[i]);
    post_shift = a.shift() + a.scale() * post_shift;
    post_scale *= a.scale();
  }
  const double m = (mean - post_shift) / post_scale;
  const double k = variance / (post_scale * post_scale);

  const auto& bc = std::get<BoxCox>(stages[box_index]);
  double z;
  if (bc.is_log()) {
    z = std::exp(m - k);
  } else {
    const double lambda = bc.lambda();
    const double s = 1.0 + lambda * m;
    const double disc = s * s + 4.0 * k * lambda * (lambda - 1.0);
    if (disc < 0.0) return std::nullopt;
    const double base = 0.5 * (s + std::sqrt(disc));
    if (!(base > 0.0)) return std::nullopt;
    z = std::pow(base, 1.0 / lambda);
  }
  if (!std::isfinite(z)) return std::nullopt;

  // Undo the affine stages in front of the Box-Cox stage.
  for (std::size_t i = box_index; i-- > 0;) z = std::get<Affine>(stages[i]).inverse(z);
  return z;
}

double invert_numeric(const Warping& w, double x, double tol, int max_iter) {
  const int dir = w.direction();
  // g is increasing in y; its root is the inverse.
  auto g = [&](double y) { return dir * (w.forward(y) - x); };

  // Any point of the domain will do as an anchor.
  double anchor = 0.0;
  double g_anchor = 0.0;
  bool found = false;
  for (int e = 0; e < 64 && !found; ++e) {
    for (double cand : {std::ldexp(1.0, e), -std::ldexp(1.0, e), 0.0}) {
      try {
        g_anchor = g(cand);
        anchor = cand;
        found = true;
        break;
      } catch (const DomainError&) {
      }
    }
  }
  if (!found) throw NumericError("invert_numeric: no point of the warping's domain found", NAN);

  // Doubling search from the anchor towards the root; steps that leave the
  // domain are halved instead.
  double lo = anchor;
  double hi = anchor;
  if (g_anchor != 0.0) {
    const double toward = g_anchor < 0.0 ? 1.0 : -1.0;
    double last = anchor;
    double step = std::max(1.0, std::abs(anchor));
    bool bracketed = false;
    for (int iter = 0; iter < 400 && !bracketed; ++iter) {
      const double cand = last + toward * step;
      double gc;
      try {
        gc = g(cand);
      } catch (const DomainError&) {
        step *= 0.5;
        continue;
      }
      if ((gc >= 0.0) == (toward > 0.0)) {
        bracketed = true;
        lo = std::min(last, cand);
        hi = std::max(last, cand);
      } else {
        last = cand;
        step *= 2.0;
      }
    }
    if (!bracketed) throw NumericError("invert_numeric: failed to bracket the root", NAN);
  } else {
    return anchor;
  }

  // rtsafe-style Newton with bisection fallback inside [lo, hi].
  double y = 0.5 * (lo + hi);
  double residual = INFINITY;
  for (int iter = 0; iter < max_iter; ++iter) {
    double fy;
    double lad;
    try {
      std::tie(fy, lad) = w.forward_with_log_deriv(y);
    } catch (const SingularityError&) {
      fy = w.forward(y);
      lad = -INFINITY;
    }
    const double gy = dir * (fy - x);
    residual = std::abs(fy - x);
    if (residual <= tol) return y;
    if (gy < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    const double slope = std::exp(lad);
    double next = y - gy / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == y) break;
    y = next;
  }
  throw NumericError("invert_numeric: no convergence, residual " + describe(residual), residual);
}

Eigen::VectorXd WarpedGpModel::warp_all(const Warping& w, const Eigen::VectorXd& y,
                                        double& lad_sum) {
  Eigen::VectorXd x(y.size());
  lad_sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const auto [xi, lad] = w.forward_with_log_deriv(y[i]);
    x[i] = xi;
    lad_sum += lad;
  }
  return x;
}

WarpedGpModel::WarpedGpModel(Warping warping, MeanFunction mean, Kernel kernel, Eigen::VectorXd t,
                             Eigen::VectorXd y)
    : warping_(std::move(warping)),
      t_(std::move(t)),
      y_(std::move(y)),
      x_(warp_all(warping_, y_, log_jacobian_)),
      base_(std::move(mean), std::move(kernel), t_, x_) {}

double WarpedGpModel::nll() const { return base_.nll() - log_jacobian_; }

PredictiveSummary WarpedGpModel::predict(const Eigen::VectorXd& t_test,
                                         const PredictOptions& opts) const {
  const double z = central_z(opts.level);
  const GaussHermiteRule rule = gauss_hermite(opts.gh_points);
  const PosteriorMarginals marg = base_.marginals(t_test);
  const double noise = opts.include_noise ? kernel().noise_variance() : 0.0;
  const Eigen::Index n = t_test.size();

  PredictiveSummary out;
  out.inputs = t_test;
  out.level = opts.level;
  out.gh_points = opts.gh_points;
  out.median.resize(n);
  out.lower.resize(n);
  out.upper.resize(n);
  out.gh_mean.resize(n);
  out.gh_var.resize(n);
  out.latent_mean = marg.mean;
  out.latent_sd.resize(n);
  out.mode.resize(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = marg.mean[i];
    const double var = marg.variance[i] + noise;
    const double sd = std::sqrt(var);
    out.latent_sd[i] = sd;
    out.median[i] = warping_.inverse(m);
    double lo = warping_.inverse(m - z * sd);
    double hi = warping_.inverse(m + z * sd);
    if (lo > hi) std::swap(lo, hi);
    out.lower[i] = lo;
    out.upper[i] = hi;
    out.mode[static_cast<std::size_t>(i)] = warped_mode(warping_, m, var);
    const double mu = gh_expectation(warping_, m, sd, [](double y) { return y; }, rule);
    out.gh_mean[i] = mu;
    out.gh_var[i] =
        gh_expectation(warping_, m, sd, [mu](double y) { return (y - mu) * (y - mu); }, rule);
  }
  return out;
}

Eigen::VectorXd WarpedGpModel::predictive_log_density(const Eigen::VectorXd& t_test,
                                                      const Eigen::VectorXd& y_test) const {
  if (t_test.size() != y_test.size()) {
    throw ArgumentError("predictive_log_density: inputs and values differ in length");
  }
  const PosteriorMarginals marg = base_.marginals(t_test);
  const double noise = kernel().noise_variance();
  Eigen::VectorXd out(t_test.size());
  for (Eigen::Index i = 0; i < t_test.size(); ++i) {
    const auto [x, lad] = warping_.forward_with_log_deriv(y_test[i]);
    out[i] = normal_log_pdf(x, marg.mean[i], marg.variance[i] + noise) + lad;
  }
  return out;
}

double WarpedGpModel::predictive_log_density(double t, double y) const {
  return predictive_log_density(Eigen::VectorXd::Constant(1, t), Eigen::VectorXd::Constant(1, y))[0];
}

Eigen::MatrixXd WarpedGpModel::sample_paths(const Eigen::VectorXd& t_test, Eigen::Index n_paths,
                                            std::uint64_t seed, bool include_noise) const {
  GaussianPosterior post = base_.joint(t_test);
  if (include_noise) post.covariance.diagonal().array() += kernel().noise_variance();
  Eigen::MatrixXd paths = sample_gaussian(post.mean, post.covariance, n_paths, seed);
  for (Eigen::Index r = 0; r < paths.rows(); ++r) {
    for (Eigen::Index c = 0; c < paths.cols(); ++c) {
      const double x = paths(r, c);
      try {
        paths(r, c) = warping_.inverse(x);
      } catch (const SingularityError& e) {
        throw SingularityError("sampled latent value " + describe(x) + " at path " +
                               std::to_string(r) + ": " + e.what());
      }
    }
  }
  return paths;
}

}  // namespace bcgp
