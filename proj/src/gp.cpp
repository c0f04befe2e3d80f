#include "bcgp/gp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bcgp/errors.hpp"
#include "bcgp/rng.hpp"

namespace bcgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

bool try_llt(const Eigen::MatrixXd& a, Eigen::MatrixXd& out) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  out = llt.matrixL();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (!(out(i, i) > 0.0) || !std::isfinite(out(i, i))) return false;
  }
  return true;
}

}  // namespace

CholeskyFactor::CholeskyFactor(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw ArgumentError("Cholesky of a non-square matrix");
  if (cov.size() == 0) return;
  if (!cov.allFinite()) {
    throw ConditioningError("covariance matrix contains non-finite entries", {});
  }
  std::vector<double> attempted{0.0};
  if (try_llt(cov, lower_)) return;

  const double scale = cov.diagonal().mean();
  if (scale > 0.0) {
    for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
      const double jitter = rel * scale;
      attempted.push_back(jitter);
      Eigen::MatrixXd a = cov;
      a.diagonal().array() += jitter;
      if (try_llt(a, lower_)) {
        jitter_ = jitter;
        return;
      }
    }
  }
  std::ostringstream os;
  os << "Cholesky factorisation failed at jitter levels:";
  for (double j : attempted) os << ' ' << j;
  throw ConditioningError(os.str(), std::move(attempted));
}

double CholeskyFactor::log_det() const { return 2.0 * lower_.diagonal().array().log().sum(); }

Eigen::MatrixXd CholeskyFactor::solve_lower(const Eigen::MatrixXd& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd CholeskyFactor::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd y = solve_lower(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double nll_gaussian(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t,
                    const Eigen::VectorXd& x) {
  if (t.size() != x.size()) throw ArgumentError("nll_gaussian: inputs and targets differ in length");
  return ConditionedGp(m, k, t, x).nll();
}

ConditionedGp::ConditionedGp(MeanFunction m, Kernel k, Eigen::VectorXd t_train,
                             Eigen::VectorXd x_train)
    : mean_(std::move(m)),
      kernel_(std::move(k)),
      t_train_(std::move(t_train)),
      x_train_(std::move(x_train)) {
  if (t_train_.size() != x_train_.size()) {
    throw ArgumentError("training inputs and targets differ in length");
  }
  if (!x_train_.allFinite() || !t_train_.allFinite()) {
    throw ArgumentError("training data must be finite");
  }
  if (t_train_.size() == 0) return;
  chol_.emplace(gram(kernel_, t_train_));
  alpha_ = chol_->solve(x_train_ - mean_.evaluate(t_train_));
}

double ConditionedGp::nll() const {
  const auto n = static_cast<double>(t_train_.size());
  if (!chol_) return 0.0;
  const Eigen::VectorXd r = x_train_ - mean_.evaluate(t_train_);
  const Eigen::VectorXd z = chol_->solve_lower(r);
  return 0.5 * n * kLog2Pi + 0.5 * z.squaredNorm() + 0.5 * chol_->log_det();
}

GaussianPosterior ConditionedGp::joint(const Eigen::VectorXd& t_test) const {
  GaussianPosterior post;
  post.inputs = t_test;
  post.mean = mean_.evaluate(t_test);
  post.covariance = gram(kernel_, t_test, t_test);
  if (chol_) {
    const Eigen::MatrixXd cross = gram(kernel_, t_train_, t_test);
    post.mean += cross.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_->solve_lower(cross);
    post.covariance.noalias() -= v.transpose() * v;
  }
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  for (Eigen::Index i = 0; i < post.covariance.rows(); ++i) {
    double& d = post.covariance(i, i);
    if (d < 0.0) d = 0.0;
  }
  return post;
}

PosteriorMarginals ConditionedGp::marginals(const Eigen::VectorXd& t_test) const {
  PosteriorMarginals out;
  out.mean = mean_.evaluate(t_test);
  out.variance = Eigen::VectorXd::Constant(t_test.size(), kernel_.signal_variance());
  if (chol_) {
    const Eigen::MatrixXd cross = gram(kernel_, t_train_, t_test);
    out.mean += cross.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_->solve_lower(cross);
    out.variance -= v.colwise().squaredNorm().transpose();
  }
  out.variance = out.variance.cwiseMax(0.0);
  return out;
}

GaussianPosterior posterior(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t_train,
                            const Eigen::VectorXd& x_train, const Eigen::VectorXd& t_test) {
  return ConditionedGp(m, k, t_train, x_train).joint(t_test);
}

Eigen::MatrixXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                Eigen::Index n, std::uint64_t seed) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw ArgumentError("sample_gaussian: shape mismatch");
  Eigen::MatrixXd out(n, d);
  Rng rng(seed);
  Eigen::MatrixXd z(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j, i) = rng.normal();
  }
  if (d == 0) return out;
  if (cov.diagonal().maxCoeff() <= 0.0) {
    out.rowwise() = mean.transpose();
    return out;
  }
  const CholeskyFactor chol(cov);
  out = (chol.lower() * z).transpose();
  out.rowwise() += mean.transpose();
  return out;
}

Eigen::VectorXd sample_prior(const MeanFunction& m, const Kernel& k, const Eigen::VectorXd& t,
                             std::uint64_t seed) {
  return sample_gaussian(m.evaluate(t), gram(k, t), 1, seed).row(0).transpose();
}

}  // namespace bcgp
