#include "bcgp/params.hpp"

#include <cmath>
#include <limits>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace {

struct Slot {
  ParamInfo info;
  double value;
};

std::vector<Slot> flatten(const Hyperparameters& h) {
  std::vector<Slot> out;
  const auto& stages = h.warping.stages();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string prefix = "warping." + std::to_string(i) + ".";
    if (const auto* bc = std::get_if<BoxCox>(&stages[i])) {
      out.push_back({{prefix + "lambda", Transform::Log}, bc->lambda()});
    } else {
      const auto& af = std::get<Affine>(stages[i]);
      out.push_back({{prefix + "a", Transform::Identity}, af.shift()});
      out.push_back({{prefix + "b", Transform::Identity}, af.scale()});
    }
  }
  if (h.mean.is_constant()) out.push_back({{"mean.c", Transform::Identity}, h.mean.value()});
  const auto& terms = h.kernel.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string prefix = "kernel." + std::to_string(i) + ".";
    if (const auto* se = std::get_if<SquaredExponential>(&terms[i])) {
      out.push_back({{prefix + "variance", Transform::Log}, se->variance});
      out.push_back({{prefix + "lengthscale", Transform::Log}, se->lengthscale});
    } else if (const auto* sm = std::get_if<SpectralMixture>(&terms[i])) {
      for (std::size_t q = 0; q < sm->components.size(); ++q) {
        const std::string s = std::to_string(q);
        out.push_back({{prefix + "w" + s, Transform::Log}, sm->components[q].weight});
        out.push_back({{prefix + "mu" + s, Transform::Log}, sm->components[q].mean_frequency});
        out.push_back({{prefix + "v" + s, Transform::Log}, sm->components[q].variance});
      }
    } else {
      out.push_back({{prefix + "noise", Transform::Log}, std::get<WhiteNoise>(terms[i]).variance});
    }
  }
  return out;
}

Hyperparameters unflatten(const Hyperparameters& structure, const std::vector<double>& v) {
  std::size_t k = 0;
  std::vector<WarpingStage> stages;
  for (const auto& stage : structure.warping.stages()) {
    if (std::holds_alternative<BoxCox>(stage)) {
      stages.emplace_back(BoxCox(v[k++]));
    } else {
      const double a = v[k++];
      const double b = v[k++];
      stages.emplace_back(Affine(a, b));
    }
  }
  MeanFunction mean = structure.mean.is_constant() ? MeanFunction::constant(v[k++]) : MeanFunction{};
  std::vector<KernelTerm> terms;
  for (const auto& term : structure.kernel.terms()) {
    if (std::holds_alternative<SquaredExponential>(term)) {
      SquaredExponential se;
      se.variance = v[k++];
      se.lengthscale = v[k++];
      terms.emplace_back(se);
    } else if (const auto* sm = std::get_if<SpectralMixture>(&term)) {
      SpectralMixture out;
      for (std::size_t q = 0; q < sm->components.size(); ++q) {
        SpectralComponent c;
        c.weight = v[k++];
        c.mean_frequency = v[k++];
        c.variance = v[k++];
        out.components.push_back(c);
      }
      terms.emplace_back(std::move(out));
    } else {
      terms.emplace_back(WhiteNoise{v[k++]});
    }
  }
  return {Warping(std::move(stages)), mean, Kernel(std::move(terms))};
}

}  // namespace

std::vector<ParamInfo> ParamSpace::all_params(const Hyperparameters& h) {
  std::vector<ParamInfo> out;
  for (const auto& s : flatten(h)) out.push_back(s.info);
  return out;
}

ParamSpace::ParamSpace(Hyperparameters reference, const std::set<std::string>& fixed)
    : reference_(std::move(reference)) {
  const auto slots = flatten(reference_);
  total_ = slots.size();
  std::set<std::string> unknown = fixed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    unknown.erase(slots[i].info.name);
    if (fixed.count(slots[i].info.name) != 0) continue;
    free_.push_back(slots[i].info);
    free_slots_.push_back(i);
  }
  if (!unknown.empty()) {
    throw ArgumentError("unknown fixed parameter '" + *unknown.begin() + "'");
  }
}

std::vector<std::string> ParamSpace::names() const {
  std::vector<std::string> out;
  for (const auto& p : free_) out.push_back(p.name);
  return out;
}

Eigen::VectorXd ParamSpace::encode(const Hyperparameters& h) const {
  const auto slots = flatten(h);
  if (slots.size() != total_) throw ArgumentError("encode: hyperparameter structure mismatch");
  Eigen::VectorXd theta(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const Slot& s = slots[free_slots_[i]];
    if (s.info.name != free_[i].name) throw ArgumentError("encode: hyperparameter structure mismatch");
    if (s.info.transform == Transform::Log) {
      if (!(s.value > 0.0)) {
        throw ArgumentError("parameter '" + s.info.name + "' must be > 0 to be optimised in log space");
      }
      theta[static_cast<Eigen::Index>(i)] = std::log(s.value);
    } else {
      theta[static_cast<Eigen::Index>(i)] = s.value;
    }
  }
  return theta;
}

Hyperparameters ParamSpace::decode(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != free_.size()) {
    throw ArgumentError("decode: expected " + std::to_string(free_.size()) + " parameters");
  }
  const auto slots = flatten(reference_);
  std::vector<double> values(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) values[i] = slots[i].value;
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const double t = theta[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(t)) throw ArgumentError("decode: non-finite parameter " + free_[i].name);
    values[free_slots_[i]] = free_[i].transform == Transform::Log ? std::exp(t) : t;
  }
  return unflatten(reference_, values);
}

WarpedGpModel make_model(const Hyperparameters& h, const Eigen::VectorXd& t,
                         const Eigen::VectorXd& y) {
  return WarpedGpModel(h.warping, h.mean, h.kernel, t, y);
}

Objective nll_objective(const ParamSpace& space, const Eigen::VectorXd& t,
                        const Eigen::VectorXd& y) {
  return [space, t, y](const Eigen::VectorXd& theta) {
    try {
      const double v = make_model(space.decode(theta), t, y).nll();
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
}

LogProb log_posterior(const ParamSpace& space, const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                      const PriorBox& box) {
  Objective nll = nll_objective(space, t, y);
  std::vector<double> bounds;
  for (const auto& p : space.params()) {
    bounds.push_back(p.transform == Transform::Log ? box.log_bound : box.raw_bound);
  }
  return [nll = std::move(nll), bounds](const Eigen::VectorXd& theta) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (!(std::abs(theta[i]) <= bounds[static_cast<std::size_t>(i)])) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    return -nll(theta);
  };
}

}  // namespace bcgp
