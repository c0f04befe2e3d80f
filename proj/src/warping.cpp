#include "bcgp/warping.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace {

std::string fmt_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

BoxCox::BoxCox(double lambda) : lambda_(lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw ArgumentError("Box-Cox lambda must be finite and >= 0, got " + fmt_value(lambda));
  }
}

double BoxCox::forward(double y) const {
  if (!std::isfinite(y)) throw DomainError("Box-Cox forward: non-finite input");
  if (is_log()) {
    if (!(y > 0.0)) throw DomainError("log warping requires y > 0, got " + fmt_value(y));
    return std::log(y);
  }
  if (y > 0.0) return std::expm1(lambda_ * std::log(y)) / lambda_;
  if (y == 0.0) return -1.0 / lambda_;
  return (-std::pow(-y, lambda_) - 1.0) / lambda_;
}

double BoxCox::inverse(double x) const {
  if (std::isnan(x)) throw DomainError("Box-Cox inverse: NaN input");
  if (is_log()) return std::exp(x);
  const double lx = lambda_ * x;
  const double u = 1.0 + lx;
  if (std::abs(u) <= std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lx))) {
    throw SingularityError("Box-Cox inverse singular at lambda*x + 1 = 0 (x = " + fmt_value(x) +
                           ", lambda = " + fmt_value(lambda_) + ")");
  }
  if (u > 0.0) return std::exp(std::log1p(lx) / lambda_);
  return -std::pow(-u, 1.0 / lambda_);
}

double BoxCox::log_abs_deriv(double y) const {
  if (!std::isfinite(y)) throw DomainError("Box-Cox derivative: non-finite input");
  if (is_log()) {
    if (!(y > 0.0)) throw DomainError("log warping requires y > 0, got " + fmt_value(y));
    return -std::log(y);
  }
  if (y == 0.0) {
    if (lambda_ == 1.0) return 0.0;
    throw SingularityError("Box-Cox derivative undefined or zero at y = 0 for lambda = " +
                           fmt_value(lambda_));
  }
  return (lambda_ - 1.0) * std::log(std::abs(y));
}

Affine::Affine(double shift, double scale) : shift_(shift), scale_(scale) {
  if (!std::isfinite(shift) || !std::isfinite(scale)) {
    throw ArgumentError("affine parameters must be finite");
  }
  if (std::abs(scale) <= kMinAbsScale) {
    throw ArgumentError("affine scale must satisfy |b| > 1e-12, got " + fmt_value(scale));
  }
}

double Affine::log_abs_deriv(double) const { return std::log(std::abs(scale_)); }

Warping::Warping() : stages_{Affine(0.0, 1.0)} {}

Warping::Warping(std::vector<WarpingStage> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw ArgumentError("a warping needs at least one stage");
}

double Warping::forward(double y) const {
  double v = y;
  for (const auto& stage : stages_) {
    v = std::visit([v](const auto& s) { return s.forward(v); }, stage);
  }
  if (!std::isfinite(v)) throw DomainError("warping forward overflow at y = " + fmt_value(y));
  return v;
}

double Warping::inverse(double x) const {
  double v = x;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    v = std::visit([v](const auto& s) { return s.inverse(v); }, *it);
  }
  if (!std::isfinite(v)) throw RangeError("warping inverse overflow at x = " + fmt_value(x));
  return v;
}

std::pair<double, double> Warping::forward_with_log_deriv(double y) const {
  double v = y;
  double lad = 0.0;
  for (const auto& stage : stages_) {
    std::visit(
        [&](const auto& s) {
          lad += s.log_abs_deriv(v);
          v = s.forward(v);
        },
        stage);
  }
  if (!std::isfinite(v)) throw DomainError("warping forward overflow at y = " + fmt_value(y));
  if (!std::isfinite(lad)) {
    throw SingularityError("warping derivative is zero or undefined at y = " + fmt_value(y));
  }
  return {v, lad};
}

double Warping::log_abs_deriv(double y) const { return forward_with_log_deriv(y).second; }

int Warping::direction() const noexcept {
  int sign = 1;
  for (const auto& stage : stages_) {
    if (const auto* a = std::get_if<Affine>(&stage); a && a->scale() < 0.0) sign = -sign;
  }
  return sign;
}

bool Warping::is_identity() const noexcept {
  for (const auto& stage : stages_) {
    const auto* a = std::get_if<Affine>(&stage);
    if (a == nullptr || a->shift() != 0.0 || a->scale() != 1.0) return false;
  }
  return true;
}

Warping compose(std::span<const Warping> parts) {
  if (parts.empty()) throw ArgumentError("compose: empty list of warpings");
  std::vector<WarpingStage> stages;
  for (const auto& w : parts) stages.insert(stages.end(), w.stages().begin(), w.stages().end());
  return Warping(std::move(stages));
}

Warping compose(std::initializer_list<Warping> parts) {
  return compose(std::span<const Warping>(parts.begin(), parts.size()));
}

}  // namespace bcgp
