#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bcgp {

/// Optimizers see a pure vector -> real function. Non-finite values are
/// treated as +infinity (minimisers) so searches route around invalid regions.
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct TracePoint {
  long iteration = 0;
  double value = 0.0;
};

struct OptResult {
  Eigen::VectorXd x;
  double value = 0.0;
  /// Best value so far after each iteration (non-increasing).
  std::vector<TracePoint> trajectory;
  std::string termination;
  long evaluations = 0;
};

struct PowellOptions {
  /// Stop when a full cycle of line searches improves f by less than this
  /// (relative).
  double tol = 1e-10;
  int max_iter = 200;
  /// Relative tolerance of each line minimisation.
  double line_tol = 1e-8;
  /// Evaluation budget per line minimisation (bracketing included).
  int line_budget = 100;
  /// Initial bracketing step along the coordinate directions.
  double initial_step = 1.0;
};

struct BfgsOptions {
  /// Stop when the infinity norm of the finite-difference gradient drops
  /// below gtol.
  double gtol = 1e-6;
  /// Stop when an iteration improves f by less than ftol * max(1, |f|).
  double ftol = 1e-12;
  int max_iter = 500;
  /// Relative central-difference step, h_j = fd_step * max(1, |x_j|).
  double fd_step = 1e-6;
};

struct BfgsPowellOptions {
  int rounds = 2;
  BfgsOptions bfgs;
  PowellOptions powell;
};

/// Powell's conjugate-direction method with Brent line minimisation.
OptResult powell_minimize(const Objective& f, const Eigen::VectorXd& x0,
                          const PowellOptions& opts = {});

/// Quasi-Newton BFGS with central finite-difference gradients and Armijo
/// backtracking.
OptResult bfgs_minimize(const Objective& f, const Eigen::VectorXd& x0,
                        const BfgsOptions& opts = {});

/// Alternates BFGS and Powell `rounds` times, each stage warm-started at the
/// best point so far.
OptResult bfgs_powell(const Objective& f, const Eigen::VectorXd& x0,
                      const BfgsPowellOptions& opts = {});

// ---------------------------------------------------------------------------
// Ensemble MCMC

using LogProb = std::function<double(const Eigen::VectorXd&)>;

struct McmcOptions {
  int walkers = 32;
  int steps = 1000;
  /// Stretch-move scale a > 1.
  double stretch = 2.0;
  std::uint64_t seed = 0;
  /// Threads evaluating one half-ensemble; results do not depend on it.
  unsigned threads = 1;
};

struct McmcChain {
  int walkers = 0;
  int steps = 0;
  int dim = 0;
  double stretch = 2.0;
  std::uint64_t seed = 0;
  /// Flattened steps x walkers x dim.
  std::vector<double> samples;
  /// steps x walkers
  Eigen::MatrixXd log_prob;
  /// Fraction of accepted proposals per walker.
  Eigen::VectorXd acceptance;

  Eigen::VectorXd sample(int step, int walker) const;
};

/// Goodman-Weare affine-invariant ensemble sampler (stretch move), updating
/// the two halves of the ensemble in turn. `initial` is walkers x dim.
/// Requires walkers >= 2 dim + 2 and even; throws NumericError if no initial
/// walker has a finite log-probability.
McmcChain ensemble_mcmc(const LogProb& logp, const Eigen::MatrixXd& initial,
                        const McmcOptions& opts);

/// Walkers initialised as center + radius * N(0, I).
McmcChain ensemble_mcmc(const LogProb& logp, const Eigen::VectorXd& center, double radius,
                        const McmcOptions& opts);

struct ParameterSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q975 = 0.0;
};

struct ChainSummary {
  int burn_in_steps = 0;
  long pooled_samples = 0;
  std::vector<ParameterSummary> parameters;
  /// Highest log-probability sample of the whole chain.
  Eigen::VectorXd map_sample;
  double map_log_prob = 0.0;
  int map_step = 0;
  int map_walker = 0;
  double mean_acceptance = 0.0;
};

ChainSummary chain_summary(const McmcChain& chain, double burn_in_fraction = 0.5);

}  // namespace bcgp
