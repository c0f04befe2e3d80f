#include <cmath>
#include <limits>

#include "bcgp/errors.hpp"
#include "bcgp/optimize.hpp"

namespace bcgp {

namespace {

struct Counted {
  const Objective& f;
  long count = 0;
  double operator()(const Eigen::VectorXd& x) {
    ++count;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
};

// Central differences; a side that is infinite falls back to a one-sided
// difference, both infinite gives a zero component.
Eigen::VectorXd fd_gradient(Counted& f, const Eigen::VectorXd& x, double fx, double rel_step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const double fp = f(probe);
    probe[j] = x[j] - h;
    const double fm = f(probe);
    probe[j] = x[j];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[j] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[j] = (fp - fx) / h;
    } else if (std::isfinite(fm)) {
      g[j] = (fx - fm) / h;
    } else {
      g[j] = 0.0;
    }
  }
  return g;
}

}  // namespace

OptResult bfgs_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                        const BfgsOptions& opts) {
  Counted f{objective};
  OptResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value)) throw ArgumentError("bfgs_minimize: objective not finite at x0");
  res.trajectory.push_back({0, res.value});
  const Eigen::Index n = x0.size();
  if (n == 0) {
    res.termination = "converged";
    res.evaluations = f.count;
    return res;
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool identity = true;
  Eigen::VectorXd g = fd_gradient(f, res.x, res.value, opts.fd_step);
  res.termination = "max_iter";

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gtol) {
      res.termination = "gradient_tolerance";
      break;
    }
    Eigen::VectorXd p = -h_inv * g;
    if (!(g.dot(p) < 0.0) || !p.allFinite()) {
      h_inv.setIdentity();
      identity = true;
      p = -g;
    }
    // Keep the unscaled first step within unit length.
    if (identity && p.norm() > 1.0) p /= p.norm();

    const double slope = g.dot(p);
    double alpha = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      x_new = res.x + alpha * p;
      f_new = f(x_new);
      if (f_new <= res.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!identity) {
        h_inv.setIdentity();
        identity = true;
        --iter;
        continue;
      }
      res.termination = "line_search_failed";
      break;
    }

    const Eigen::VectorXd g_new = fd_gradient(f, x_new, f_new, opts.fd_step);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double improvement = res.value - f_new;
    res.x = x_new;
    res.value = f_new;
    g = g_new;
    res.trajectory.push_back({iter, res.value});

    const double ys = y.dot(s);
    if (ys > 1e-10 * y.norm() * s.norm()) {
      if (identity) h_inv *= ys / y.squaredNorm();
      const double rho = 1.0 / ys;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
      identity = false;
    }
    if (improvement <= opts.ftol * std::max(1.0, std::abs(res.value))) {
      res.termination = "converged";
      break;
    }
  }
  res.evaluations = f.count;
  return res;
}

OptResult bfgs_powell(const Objective& f, const Eigen::VectorXd& x0, const BfgsPowellOptions& opts) {
  if (opts.rounds < 1) throw ArgumentError("bfgs_powell needs rounds >= 1");
  OptResult total;
  total.x = x0;
  total.value = std::numeric_limits<double>::infinity();
  long offset = 0;
  auto absorb = [&](const OptResult& stage, const char* name, int round) {
    for (const auto& tp : stage.trajectory) {
      const double best = std::min(total.trajectory.empty() ? tp.value : total.trajectory.back().value,
                                   tp.value);
      total.trajectory.push_back({offset + tp.iteration, best});
    }
    offset += stage.trajectory.empty() ? 0 : stage.trajectory.back().iteration + 1;
    total.evaluations += stage.evaluations;
    if (stage.value < total.value) {
      total.value = stage.value;
      total.x = stage.x;
    }
    total.termination = std::string(name) + " round " + std::to_string(round) + ": " +
                        stage.termination;
  };
  for (int r = 1; r <= opts.rounds; ++r) {
    absorb(bfgs_minimize(f, total.x, opts.bfgs), "bfgs", r);
    absorb(powell_minimize(f, total.x, opts.powell), "powell", r);
  }
  return total;
}

}  // namespace bcgp
