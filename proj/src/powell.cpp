#include <cmath>
#include <limits>

#include "bcgp/errors.hpp"
#include "bcgp/optimize.hpp"

namespace bcgp {

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kCGold = 0.3819660112501051;

struct Counted {
  const Objective& f;
  long count = 0;
  double operator()(const Eigen::VectorXd& x) {
    ++count;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
};

struct LineResult {
  double alpha = 0.0;
  double value = 0.0;
};

// Minimises phi(alpha) = f(x + alpha d) starting from phi(0) = f0. Returns the
// best point seen, which is never worse than alpha = 0.
LineResult line_minimize(Counted& f, const Eigen::VectorXd& x, const Eigen::VectorXd& d, double f0,
                         double step, double rel_tol, int budget) {
  int used = 0;
  LineResult best{0.0, f0};
  auto phi = [&](double a) {
    ++used;
    const double v = f(x + a * d);
    if (v < best.value) best = {a, v};
    return v;
  };

  // Bracket (a, b, c) with phi(b) <= phi(a), phi(c), golden expansion only so
  // that infinite values cannot poison a parabolic extrapolation.
  double a = 0.0;
  double fa = f0;
  double b = step;
  double fb = phi(b);
  double c;
  double fc;
  if (fb >= fa) {
    c = -step;
    fc = phi(c);
    if (fc >= fa) {
      // 0 is already the lowest of three points.
      b = a;
      fb = fa;
      a = -step;
      c = step;
    } else {
      a = 0.0;
      b = -step;
      fb = fc;
      c = b + kGolden * (b - a);
      fc = phi(c);
    }
  } else {
    c = b + kGolden * (b - a);
    fc = phi(c);
  }
  while (fc < fb && used < budget) {
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = b + kGolden * (b - a);
    fc = phi(c);
  }
  if (fc < fb) return best;  // budget exhausted while still descending

  // Brent's method on [min(a, c), max(a, c)] starting from b.
  double lo = std::min(a, c);
  double hi = std::max(a, c);
  double xm = b;
  double w = b;
  double v = b;
  double fx = fb;
  double fw = fb;
  double fv = fb;
  double e = 0.0;
  double dstep = 0.0;
  constexpr double kZeps = 1e-14;
  while (used < budget) {
    const double mid = 0.5 * (lo + hi);
    const double tol1 = rel_tol * std::abs(xm) + kZeps;
    const double tol2 = 2.0 * tol1;
    if (std::abs(xm - mid) <= tol2 - 0.5 * (hi - lo)) break;
    bool golden = true;
    if (std::abs(e) > tol1 && std::isfinite(fw) && std::isfinite(fv)) {
      double r = (xm - w) * (fx - fv);
      double q = (xm - v) * (fx - fw);
      double p = (xm - v) * q - (xm - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = dstep;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (lo - xm) || p >= q * (hi - xm))) {
        dstep = p / q;
        const double u = xm + dstep;
        if (u - lo < tol2 || hi - u < tol2) dstep = std::copysign(tol1, mid - xm);
        golden = false;
      }
    }
    if (golden) {
      e = (xm >= mid) ? lo - xm : hi - xm;
      dstep = kCGold * e;
    }
    const double u = std::abs(dstep) >= tol1 ? xm + dstep : xm + std::copysign(tol1, dstep);
    const double fu = phi(u);
    if (fu <= fx) {
      if (u >= xm) {
        lo = xm;
      } else {
        hi = xm;
      }
      v = w;
      fv = fw;
      w = xm;
      fw = fx;
      xm = u;
      fx = fu;
    } else {
      if (u < xm) {
        lo = u;
      } else {
        hi = u;
      }
      if (fu <= fw || w == xm) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == xm || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return best;
}

}  // namespace

OptResult powell_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                          const PowellOptions& opts) {
  Counted f{objective};
  OptResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value)) throw ArgumentError("powell_minimize: objective not finite at x0");
  const Eigen::Index n = x0.size();
  res.trajectory.push_back({0, res.value});
  if (n == 0) {
    res.termination = "converged";
    res.evaluations = f.count;
    return res;
  }

  // Unit directions with their own bracketing step lengths.
  std::vector<Eigen::VectorXd> dirs;
  std::vector<double> steps;
  for (Eigen::Index i = 0; i < n; ++i) {
    dirs.push_back(Eigen::VectorXd::Unit(n, i));
    steps.push_back(opts.initial_step);
  }

  res.termination = "max_iter";
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const double f_start = res.value;
    const Eigen::VectorXd x_start = res.x;
    double biggest_drop = 0.0;
    std::size_t biggest = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double before = res.value;
      const LineResult lr =
          line_minimize(f, res.x, dirs[i], res.value, steps[i], opts.line_tol, opts.line_budget);
      if (lr.alpha != 0.0) {
        res.x += lr.alpha * dirs[i];
        res.value = lr.value;
        steps[i] = std::max(std::abs(lr.alpha), 1e-8);
      }
      if (before - res.value > biggest_drop) {
        biggest_drop = before - res.value;
        biggest = i;
      }
    }
    res.trajectory.push_back({iter, res.value});
    if (2.0 * (f_start - res.value) <=
        opts.tol * (std::abs(f_start) + std::abs(res.value)) + 1e-300) {
      res.termination = "converged";
      break;
    }

    // Composite direction of the cycle; replace the direction of largest
    // decrease when the extrapolation test says it is worth it.
    const Eigen::VectorXd shift = res.x - x_start;
    const double shift_norm = shift.norm();
    if (shift_norm == 0.0) continue;
    const double f_extra = f(2.0 * res.x - x_start);
    if (f_extra < f_start) {
      const double t = 2.0 * (f_start - 2.0 * res.value + f_extra) *
                           std::pow(f_start - res.value - biggest_drop, 2) -
                       biggest_drop * std::pow(f_start - f_extra, 2);
      if (t < 0.0) {
        const Eigen::VectorXd unit = shift / shift_norm;
        const LineResult lr =
            line_minimize(f, res.x, unit, res.value, shift_norm, opts.line_tol, opts.line_budget);
        if (lr.alpha != 0.0) {
          res.x += lr.alpha * unit;
          res.value = lr.value;
        }
        dirs[biggest] = dirs.back();
        steps[biggest] = steps.back();
        dirs.back() = unit;
        steps.back() = shift_norm;
        res.trajectory.back().value = res.value;
      }
    }
  }
  res.evaluations = f.count;
  return res;
}

}  // namespace bcgp
