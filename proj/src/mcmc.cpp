#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bcgp/errors.hpp"
#include "bcgp/optimize.hpp"
#include "bcgp/rng.hpp"

namespace bcgp {

namespace {

double safe_logp(const LogProb& logp, const Eigen::VectorXd& x) {
  const double v = logp(x);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

// Evaluates logp at every column of `points`; chunked over threads, each
// result lands in its own slot so the outcome is independent of scheduling.
Eigen::VectorXd evaluate_all(const LogProb& logp, const Eigen::MatrixXd& points, unsigned threads) {
  const Eigen::Index m = points.cols();
  Eigen::VectorXd out(m);
  if (threads <= 1 || m < 2) {
    for (Eigen::Index i = 0; i < m; ++i) out[i] = safe_logp(logp, points.col(i));
    return out;
  }
  const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(m));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (Eigen::Index i = w; i < m; i += used) out[i] = safe_logp(logp, points.col(i));
    });
  }
  pool.clear();
  return out;
}

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

Eigen::VectorXd McmcChain::sample(int step, int walker) const {
  const auto offset = (static_cast<std::size_t>(step) * walkers + walker) * dim;
  return Eigen::Map<const Eigen::VectorXd>(samples.data() + offset, dim);
}

McmcChain ensemble_mcmc(const LogProb& logp, const Eigen::MatrixXd& initial,
                        const McmcOptions& opts) {
  const int k = static_cast<int>(initial.rows());
  const int n = static_cast<int>(initial.cols());
  if (k != opts.walkers) throw ArgumentError("ensemble_mcmc: initial walker count mismatch");
  if (k < 2 * n + 2 || k % 2 != 0) {
    throw ArgumentError("ensemble_mcmc needs an even number of walkers >= 2 n + 2 (n = " +
                        std::to_string(n) + ", walkers = " + std::to_string(k) + ")");
  }
  if (opts.steps < 1) throw ArgumentError("ensemble_mcmc needs steps >= 1");
  if (!(opts.stretch > 1.0)) throw ArgumentError("stretch parameter must exceed 1");

  McmcChain chain;
  chain.walkers = k;
  chain.steps = opts.steps;
  chain.dim = n;
  chain.stretch = opts.stretch;
  chain.seed = opts.seed;
  chain.samples.resize(static_cast<std::size_t>(opts.steps) * k * n);
  chain.log_prob.resize(opts.steps, k);

  // Walkers are columns.
  Eigen::MatrixXd pos = initial.transpose();
  Eigen::VectorXd lp = evaluate_all(logp, pos, opts.threads);
  if (!lp.array().isFinite().any()) {
    throw NumericError("ensemble_mcmc: no initial walker has a finite log-probability", NAN);
  }

  Rng rng(opts.seed);
  const int half = k / 2;
  const double a = opts.stretch;
  Eigen::VectorXd accepted = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd proposals(n, half);
  Eigen::VectorXd zs(half);
  Eigen::VectorXd log_u(half);

  for (int step = 0; step < opts.steps; ++step) {
    for (int h = 0; h < 2; ++h) {
      const int first = h * half;
      const int other = (1 - h) * half;
      for (int j = 0; j < half; ++j) {
        const int partner = other + static_cast<int>(rng.index(static_cast<std::size_t>(half)));
        const double u = rng.uniform();
        const double z = std::pow((a - 1.0) * u + 1.0, 2) / a;
        zs[j] = z;
        proposals.col(j) = pos.col(partner) + z * (pos.col(first + j) - pos.col(partner));
        log_u[j] = std::log(rng.uniform_open());
      }
      const Eigen::VectorXd lp_new = evaluate_all(logp, proposals, opts.threads);
      for (int j = 0; j < half; ++j) {
        const int w = first + j;
        if (!std::isfinite(lp_new[j]) && lp_new[j] < 0.0) continue;
        const double log_ratio = (n - 1) * std::log(zs[j]) + lp_new[j] - lp[w];
        if (log_u[j] < log_ratio) {
          pos.col(w) = proposals.col(j);
          lp[w] = lp_new[j];
          accepted[w] += 1.0;
        }
      }
    }
    std::copy(pos.data(), pos.data() + static_cast<std::ptrdiff_t>(k) * n,
              chain.samples.begin() + static_cast<std::ptrdiff_t>(step) * k * n);
    chain.log_prob.row(step) = lp.transpose();
  }
  chain.acceptance = accepted / static_cast<double>(opts.steps);
  return chain;
}

McmcChain ensemble_mcmc(const LogProb& logp, const Eigen::VectorXd& center, double radius,
                        const McmcOptions& opts) {
  Rng rng(opts.seed ^ 0x5DEECE66DULL);
  Eigen::MatrixXd initial(opts.walkers, center.size());
  for (int w = 0; w < opts.walkers; ++w) {
    for (Eigen::Index d = 0; d < center.size(); ++d) initial(w, d) = center[d] + radius * rng.normal();
  }
  return ensemble_mcmc(logp, initial, opts);
}

ChainSummary chain_summary(const McmcChain& chain, double burn_in_fraction) {
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ArgumentError("burn-in fraction must lie in [0, 1)");
  }
  ChainSummary out;
  out.burn_in_steps = static_cast<int>(std::floor(burn_in_fraction * chain.steps));
  const int kept = chain.steps - out.burn_in_steps;
  if (kept <= 0 || chain.walkers <= 0) throw ArgumentError("chain is empty after burn-in");
  out.pooled_samples = static_cast<long>(kept) * chain.walkers;

  std::vector<double> values(static_cast<std::size_t>(out.pooled_samples));
  for (int d = 0; d < chain.dim; ++d) {
    std::size_t idx = 0;
    double sum = 0.0;
    for (int s = out.burn_in_steps; s < chain.steps; ++s) {
      for (int w = 0; w < chain.walkers; ++w) {
        const double v =
            chain.samples[(static_cast<std::size_t>(s) * chain.walkers + w) * chain.dim + d];
        values[idx++] = v;
        sum += v;
      }
    }
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    std::sort(values.begin(), values.end());
    ParameterSummary p;
    p.mean = mean;
    p.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    p.q025 = quantile_sorted(values, 0.025);
    p.q25 = quantile_sorted(values, 0.25);
    p.q50 = quantile_sorted(values, 0.5);
    p.q75 = quantile_sorted(values, 0.75);
    p.q975 = quantile_sorted(values, 0.975);
    out.parameters.push_back(p);
  }

  Eigen::Index best_step = 0;
  Eigen::Index best_walker = 0;
  out.map_log_prob = chain.log_prob.maxCoeff(&best_step, &best_walker);
  out.map_step = static_cast<int>(best_step);
  out.map_walker = static_cast<int>(best_walker);
  out.map_sample = chain.sample(out.map_step, out.map_walker);
  out.mean_acceptance = chain.acceptance.mean();
  return out;
}

}  // namespace bcgp
