#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcgp/data.hpp"
#include "bcgp/optimize.hpp"
#include "bcgp/params.hpp"
#include "bcgp/serialize.hpp"
#include "bcgp/wgp.hpp"

namespace bcgp {

/// One additive kernel term of a model spec. Unset values are initialised
/// from the (warped) training data.
struct KernelTermConfig {
  enum class Type { SquaredExponential, SpectralMixture };
  Type type = Type::SquaredExponential;
  std::optional<double> variance;
  std::optional<double> lengthscale;
  int components = 2;
  /// Explicit spectral components; empty means periodogram initialisation.
  std::vector<SpectralComponent> spectral;
};

struct ModelConfig {
  Warping warping;
  /// Fully qualified names of parameters held constant.
  std::set<std::string> fixed;
  std::vector<KernelTermConfig> kernel;
  std::optional<double> noise;
  bool constant_mean = true;
  std::optional<double> mean_value;
};

struct OptimizerConfig {
  /// none | bfgs | powell | bfgs-powell | mcmc
  std::string method = "bfgs-powell";
  BfgsOptions bfgs;
  PowellOptions powell;
  int rounds = 2;
  McmcOptions mcmc;
  double burn_in = 0.5;
  double init_radius = 0.1;
  PriorBox prior;
};

struct RunConfig {
  std::string name;
  ModelConfig model;
  OptimizerConfig optimizer;
};

struct DatasetConfig {
  std::string path;
  std::string time_column;
  std::string value_column;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SplitSpec split;
  std::uint64_t seed = 0;
  PredictOptions prediction;
  std::string output_dir = "out";
  std::vector<RunConfig> runs;
  /// The parsed document, used for the config hash.
  json source;
};

/// Validates the whole document before anything runs; errors carry the path
/// to the offending field. Relative dataset paths resolve against base_dir.
ExperimentConfig parse_config(const json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Replaces the seed everywhere it is used (split and samplers).
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

/// Seed of the MCMC stream derived from the experiment seed.
std::uint64_t mcmc_seed(std::uint64_t seed);

/// Lomb-Scargle periodogram of irregularly sampled data at the given
/// frequencies (cycles per time unit).
Eigen::VectorXd lomb_scargle(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& freqs);

/// Starting hyperparameters: data-driven defaults for every unset value,
/// computed on the training data pushed through the initial warping.
Hyperparameters initial_hyperparameters(const ModelConfig& model, const TimeSeries& train);

struct FitResult {
  std::string name;
  std::string method;
  std::vector<std::string> parameter_names;
  Hyperparameters initial;
  Hyperparameters fitted;
  OptResult opt;
  std::optional<McmcChain> chain;
  std::optional<ChainSummary> summary;
  double nll = 0.0;
};

/// Trains one run on the training series. MCMC runs select the
/// highest-posterior sample.
FitResult fit_run(const RunConfig& run, const TimeSeries& train, std::uint64_t seed);

struct RegimeResult {
  std::string regime;  // "reconstruct" | "forecast"
  TimeSeries test;
  PredictiveSummary prediction;
  Scores scores;
  /// Scores when the Gauss-Hermite mean is used as point prediction.
  Scores scores_gh_mean;
};

struct RunEvaluation {
  FitResult fit;
  std::vector<RegimeResult> regimes;
};

struct Evaluation {
  Split split;
  std::vector<RunEvaluation> runs;
  json report;
};

/// split -> fit -> predict -> score for every run; the forecast regime is
/// omitted when the forecast set is empty.
Evaluation evaluate(const ExperimentConfig& cfg);

WarpedGpModel fitted_model(const FitResult& fit, const TimeSeries& train);

/// Fit report (no wall-clock data so that reruns are byte-identical).
json fit_report(const FitResult& fit, const TimeSeries& train);

}  // namespace bcgp
