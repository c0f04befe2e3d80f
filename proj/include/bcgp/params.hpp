#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "bcgp/kernel.hpp"
#include "bcgp/optimize.hpp"
#include "bcgp/warping.hpp"
#include "bcgp/wgp.hpp"

namespace bcgp {

/// Everything a warped GP needs besides its data.
struct Hyperparameters {
  Warping warping;
  MeanFunction mean;
  Kernel kernel;
};

enum class Transform { Identity, Log };

struct ParamInfo {
  /// Dotted path, e.g. "warping.1.lambda", "kernel.0.mu1", "mean.c".
  std::string name;
  Transform transform = Transform::Identity;
};

/// Maps the free hyperparameters of a fixed model structure to an
/// unconstrained vector: positive quantities through log, the rest as-is.
/// Fixed parameters keep the value they have in the reference.
class ParamSpace {
 public:
  explicit ParamSpace(Hyperparameters reference, const std::set<std::string>& fixed = {});

  std::size_t dim() const noexcept { return free_.size(); }
  const std::vector<ParamInfo>& params() const noexcept { return free_; }
  std::vector<std::string> names() const;
  const Hyperparameters& reference() const noexcept { return reference_; }

  Eigen::VectorXd encode(const Hyperparameters& h) const;
  /// Throws ArgumentError when the vector decodes to invalid parameters
  /// (e.g. an affine scale below the guard).
  Hyperparameters decode(const Eigen::VectorXd& theta) const;

  /// Every parameter of `h` in encoding order, fixed or not.
  static std::vector<ParamInfo> all_params(const Hyperparameters& h);

 private:
  Hyperparameters reference_;
  std::vector<ParamInfo> free_;
  std::vector<std::size_t> free_slots_;
  std::size_t total_ = 0;
};

/// Warped NLL as a function of the unconstrained vector; library errors
/// (domain, singularity, conditioning, invalid parameters) map to +inf.
Objective nll_objective(const ParamSpace& space, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& y);

/// Flat prior on a box: |theta_j| <= log_bound for log-scaled coordinates and
/// |theta_j| <= raw_bound otherwise.
struct PriorBox {
  double log_bound = 30.0;
  double raw_bound = 1e6;
};

/// -NLL inside the prior box, -inf outside or on library errors.
LogProb log_posterior(const ParamSpace& space, const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                      const PriorBox& box = {});

WarpedGpModel make_model(const Hyperparameters& h, const Eigen::VectorXd& t,
                         const Eigen::VectorXd& y);

}  // namespace bcgp
