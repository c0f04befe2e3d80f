#include "bcgp/kernel.hpp"

#include <cmath>
#include <numbers>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace {

void validate(const SquaredExponential& se) {
  if (!(se.variance >= 0.0) || !(se.lengthscale > 0.0) || !std::isfinite(se.variance) ||
      !std::isfinite(se.lengthscale)) {
    throw ArgumentError("squared-exponential kernel needs variance >= 0 and lengthscale > 0");
  }
}

void validate(const SpectralMixture& sm) {
  if (sm.components.empty()) throw ArgumentError("spectral mixture needs at least one component");
  for (const auto& c : sm.components) {
    if (!(c.weight >= 0.0) || !(c.mean_frequency >= 0.0) || !(c.variance > 0.0) ||
        !std::isfinite(c.weight) || !std::isfinite(c.mean_frequency) || !std::isfinite(c.variance)) {
      throw ArgumentError("spectral component needs weight >= 0, frequency >= 0, variance > 0");
    }
  }
}

void validate(const WhiteNoise& wn) {
  if (!(wn.variance >= 0.0) || !std::isfinite(wn.variance)) {
    throw ArgumentError("white-noise variance must be finite and >= 0");
  }
}

double eval(const SquaredExponential& se, double tau) {
  const double r = tau / se.lengthscale;
  return se.variance * std::exp(-0.5 * r * r);
}

double eval(const SpectralMixture& sm, double tau) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double sum = 0.0;
  for (const auto& c : sm.components) {
    sum += c.weight * std::exp(-0.5 * two_pi * two_pi * tau * tau * c.variance) *
           std::cos(two_pi * c.mean_frequency * tau);
  }
  return sum;
}

double eval(const WhiteNoise&, double) { return 0.0; }

}  // namespace

Kernel::Kernel(KernelTerm term) : Kernel(std::vector<KernelTerm>{std::move(term)}) {}

Kernel::Kernel(std::vector<KernelTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) std::visit([](const auto& v) { validate(v); }, t);
}

Kernel Kernel::operator+(const Kernel& other) const {
  std::vector<KernelTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return Kernel(std::move(all));
}

double Kernel::operator()(double tau) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += std::visit([tau](const auto& v) { return eval(v, tau); }, t);
  return sum;
}

double Kernel::noise_variance() const noexcept {
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (const auto* wn = std::get_if<WhiteNoise>(&t)) sum += wn->variance;
  }
  return sum;
}

MeanFunction MeanFunction::constant(double c) {
  if (!std::isfinite(c)) throw ArgumentError("constant mean must be finite");
  MeanFunction m;
  m.constant_ = true;
  m.value_ = c;
  return m;
}

Eigen::VectorXd MeanFunction::evaluate(const Eigen::VectorXd& t) const {
  return Eigen::VectorXd::Constant(t.size(), value_);
}

Eigen::MatrixXd gram(const Kernel& k, const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
  Eigen::MatrixXd g(t.size(), s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    for (Eigen::Index i = 0; i < t.size(); ++i) g(i, j) = k(t[i] - s[j]);
  }
  return g;
}

Eigen::MatrixXd gram(const Kernel& k, const Eigen::VectorXd& t) {
  const Eigen::Index n = t.size();
  Eigen::MatrixXd g(n, n);
  const double diag = k(0.0) + k.noise_variance();
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = diag;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = k(t[i] - t[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace bcgp
