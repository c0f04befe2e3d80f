#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace bcgp {

/// Signed Box-Cox power transform
///
///   forward(y) = (sgn(y) |y|^lambda - 1) / lambda,   lambda > 0
///   forward(y) = log(y),                            lambda = 0
///
/// with sgn(0) = 0. Below kLogThreshold the exact log/exp pair is used instead
/// of the power form.
class BoxCox {
 public:
  static constexpr double kLogThreshold = 1e-7;

  explicit BoxCox(double lambda);

  double lambda() const noexcept { return lambda_; }
  bool is_log() const noexcept { return lambda_ < kLogThreshold; }

  double forward(double y) const;
  double inverse(double x) const;
  double log_abs_deriv(double y) const;

 private:
  double lambda_;
};

/// forward(y) = shift + scale * y, scale != 0.
class Affine {
 public:
  static constexpr double kMinAbsScale = 1e-12;

  Affine(double shift, double scale);

  double shift() const noexcept { return shift_; }
  double scale() const noexcept { return scale_; }

  double forward(double y) const { return shift_ + scale_ * y; }
  double inverse(double x) const { return (x - shift_) / scale_; }
  double log_abs_deriv(double /*y*/) const;

 private:
  double shift_;
  double scale_;
};

using WarpingStage = std::variant<BoxCox, Affine>;

/// Composition of elementary stages, applied first-to-last in the forward
/// direction. Immutable once built; evaluation costs O(number of stages).
class Warping {
 public:
  /// Identity, stored as a single Affine(0, 1) stage.
  Warping();
  /// Throws ArgumentError on an empty stage list.
  explicit Warping(std::vector<WarpingStage> stages);

  static Warping identity() { return Warping(); }
  static Warping box_cox(double lambda) { return Warping({BoxCox(lambda)}); }
  static Warping affine(double shift, double scale) { return Warping({Affine(shift, scale)}); }

  double forward(double y) const;
  double inverse(double x) const;
  /// log |d forward / dy| via the chain rule over the stages.
  double log_abs_deriv(double y) const;
  /// forward(y) and log_abs_deriv(y) in a single pass.
  std::pair<double, double> forward_with_log_deriv(double y) const;

  /// +1 if the composition is increasing, -1 if decreasing.
  int direction() const noexcept;
  bool is_identity() const noexcept;
  const std::vector<WarpingStage>& stages() const noexcept { return stages_; }
  std::size_t size() const noexcept { return stages_.size(); }

 private:
  std::vector<WarpingStage> stages_;
};

/// Flattens the given warpings into one composition, first element applied
/// first. Throws ArgumentError when `parts` is empty.
Warping compose(std::span<const Warping> parts);
Warping compose(std::initializer_list<Warping> parts);

}  // namespace bcgp
