#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bcgp/errors.hpp"
#include "bcgp/experiment.hpp"
#include "bcgp/gp.hpp"
#include "bcgp/rng.hpp"

using namespace bcgp;

namespace {

const std::string kSource = BCGP_SOURCE_DIR;

// Writes a synthetic CSV (t, y) and returns its absolute path.
std::string write_series(const std::string& name, const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
  const auto path = std::filesystem::temp_directory_path() / ("bcgp_exp_" + name + ".csv");
  std::ofstream out(path);
  out << "t,y\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < t.size(); ++i) out << t[i] << "," << y[i] << "\n";
  return path.string();
}

json base_config(const std::string& csv) {
  json j = json::parse(R"({
    "dataset": {"path": "", "time_column": "t", "value_column": "y"},
    "split": {"mode": "random", "train_count": 20},
    "seed": 3,
    "runs": [{"name": "gp", "model": {"kernel": {"type": "squared_exponential"}, "noise": "auto"},
              "optimizer": {"method": "bfgs"}}]
  })");
  j["dataset"]["path"] = csv;
  return j;
}

void expect_config_error(const json& j, const std::string& fragment) {
  try {
    parse_config(j);
    FAIL() << "expected ConfigError for " << j.dump();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

// Smooth positive series used by several tests.
std::pair<Eigen::VectorXd, Eigen::VectorXd> toy_series(int n) {
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, n - 1.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = 3.0 + std::sin(0.3 * t[i]) + 0.1 * std::cos(1.7 * t[i]);
  return {t, y};
}

}  // namespace


TEST(Config, CheckedInConfigsParse) {
  for (const char* name : {"sunspots.json", "tbill.json"}) {
    const ExperimentConfig cfg = load_config(kSource + "/configs/" + name);
    EXPECT_FALSE(cfg.runs.empty());
    EXPECT_TRUE(std::filesystem::exists(cfg.dataset.path)) << cfg.dataset.path;
  }
  const ExperimentConfig sun = load_config(kSource + "/configs/sunspots.json");
  EXPECT_EQ(sun.runs.size(), 4u);
  EXPECT_EQ(sun.runs[2].model.fixed.count("warping.0.a"), 1u);
}

TEST(Config, ErrorsCarryFieldPaths) {
  const auto [t, y] = toy_series(30);
  const json good = base_config(write_series("cfg", t, y));
  EXPECT_NO_THROW(parse_config(good));

  json j = good;
  j["runs"][0]["model"]["warping"] = json::parse(R"([{"kind": "sinh", "params": {}}])");
  expect_config_error(j, "runs[0].model.warping[0].kind");

  j = good;
  j["bogus"] = 1;
  expect_config_error(j, "config.bogus");

  j = good;
  j["runs"][0]["optimizer"]["method"] = "lbfgs";
  expect_config_error(j, "runs[0].optimizer.method");

  j = good;
  j["runs"][0]["model"]["kernel"]["type"] = "matern";
  expect_config_error(j, "runs[0].model.kernel.type");

  j = good;
  j["runs"][0]["model"]["fixed"] = {"kernel.0.nope"};
  expect_config_error(j, "runs[0].model");

  j = good;
  j["split"]["mode"] = "sequential";
  expect_config_error(j, "split.mode");

  j = good;
  j["prediction"] = {{"level", 1.5}};
  expect_config_error(j, "prediction.level");

  j = good;
  j["runs"].push_back(good["runs"][0]);
  expect_config_error(j, "duplicate");
}

TEST(Config, SeedOverrideAndDerivation) {
  const auto [t, y] = toy_series(30);
  ExperimentConfig cfg = parse_config(base_config(write_series("seed", t, y)));
  override_seed(cfg, 77);
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.split.seed, 77u);
  EXPECT_NE(mcmc_seed(1), mcmc_seed(2));
  EXPECT_NE(mcmc_seed(1), 1u);
}

TEST(LombScargle, FindsTheFrequency) {
  Rng rng(1);
  const int n = 120;
  Eigen::VectorXd t(n);
  Eigen::VectorXd x(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += 0.5 + rng.uniform();
    t[i] = acc;
    x[i] = std::sin(2 * std::numbers::pi * 0.11 * t[i] + 0.4);
  }
  const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(400, 0.005, 0.4);
  Eigen::Index best = 0;
  lomb_scargle(t, x, f).maxCoeff(&best);
  EXPECT_NEAR(f[best], 0.11, 0.002);
}

TEST(Fit, RecoversSquaredExponentialLengthscale) {
  const double ell = 2.0;
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(200, 0.0, 60.0);
  const Kernel k(std::vector<KernelTerm>{SquaredExponential{1.0, ell}, WhiteNoise{0.01}});
  const Eigen::VectorXd y = sample_prior(MeanFunction::constant(0.0), k, t, 12);
  const json j = base_config(write_series("ell", t, y));
  const ExperimentConfig cfg = parse_config(j);
  const FitResult fit = fit_run(cfg.runs[0], TimeSeries(t, y), cfg.seed);
  const auto& se = std::get<SquaredExponential>(fit.fitted.kernel.terms()[0]);
  EXPECT_NEAR(se.lengthscale, ell, 0.2 * ell);
  EXPECT_LT(fit.nll, fit.opt.trajectory.front().value);
  EXPECT_EQ(fit.parameter_names.front(), "mean.c");
}

TEST(Fit, BfgsPowellNotWorseThanBfgs) {
  const auto [t, y] = toy_series(40);
  json j = base_config(write_series("bp", t, y));
  j["runs"][0]["model"]["warping"] = json::parse(R"([{"kind": "boxcox", "params": {"lambda": 0.5}}])");
  j["runs"].push_back(j["runs"][0]);
  j["runs"][1]["name"] = "gp_bp";
  j["runs"][1]["optimizer"]["method"] = "bfgs-powell";
  const ExperimentConfig cfg = parse_config(j);
  const TimeSeries series(t, y);
  const FitResult a = fit_run(cfg.runs[0], series, cfg.seed);
  const FitResult b = fit_run(cfg.runs[1], series, cfg.seed);
  EXPECT_LE(b.nll, a.nll);
  EXPECT_EQ(b.initial.kernel.noise_variance(), a.initial.kernel.noise_variance());
}

TEST(Evaluate, DeterministicReportsAndOmittedForecast) {
  const auto [t, y] = toy_series(40);
  json j = base_config(write_series("eval", t, y));
  j["split"] = json::parse(R"({"mode": "reconstruct_forecast", "window": [0, 39], "train_count": 15})");
  j["runs"][0]["optimizer"]["method"] = "powell";
  const ExperimentConfig cfg = parse_config(j);
  const Evaluation a = evaluate(cfg);
  const Evaluation b = evaluate(cfg);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_TRUE(a.report["regimes"].contains("reconstruct"));
  EXPECT_FALSE(a.report["regimes"].contains("forecast"));
  const json& row = a.report["regimes"]["reconstruct"]["rows"]["gp"];
  for (const char* key : {"mae", "mse", "nlpd", "nll"}) EXPECT_TRUE(row.contains(key)) << key;
  EXPECT_EQ(a.report["regimes"]["reconstruct"]["n_test"], 25);
  EXPECT_EQ(a.report["config_hash"], config_hash(j));

  j["split"]["window"] = {0, 29};
  const Evaluation c = evaluate(parse_config(j));
  EXPECT_EQ(c.report["regimes"]["forecast"]["n_test"], 10);
}

TEST(Evaluate, McmcRunSelectsMap) {
  const auto [t, y] = toy_series(25);
  json j = base_config(write_series("mcmc", t, y));
  j["runs"][0]["optimizer"] = json::parse(R"({"method": "mcmc", "walkers": 10, "steps": 60})");
  const ExperimentConfig cfg = parse_config(j);
  const FitResult fit = fit_run(cfg.runs[0], TimeSeries(t, y), cfg.seed);
  ASSERT_TRUE(fit.summary.has_value());
  EXPECT_DOUBLE_EQ(fit.opt.value, -fit.summary->map_log_prob);
  EXPECT_EQ(fit.chain->seed, mcmc_seed(cfg.seed));
  EXPECT_EQ(fit.opt.trajectory.size(), 60u);
}

// 95% intervals of a correctly specified Box-Cox GP cover 95% of held-out
// observations: 100 replicate data sets x 100 test points.
TEST(Coverage, KnownBoxCoxGp) {
  const Warping w = Warping::box_cox(0.5);
  const MeanFunction mean = MeanFunction::constant(3.0);
  const Kernel k(std::vector<KernelTerm>{SquaredExponential{0.5, 3.0}, WhiteNoise{0.05}});
  Rng rng(2025);
  long covered = 0;
  long total = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd t(140);
    for (auto& v : t) v = 100.0 * rng.uniform();
    std::sort(t.begin(), t.end());
    const Eigen::VectorXd x = sample_prior(mean, k, t, 1000 + rep);
    Eigen::VectorXd y(140);
    for (int i = 0; i < 140; ++i) y[i] = w.inverse(x[i]);
    // Every third point (roughly) trains, the rest are held out.
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (Eigen::Index i = 0; i < 140; ++i) (train.size() < 40 && i % 3 == 0 ? train : test).push_back(i);
    const WarpedGpModel model(w, mean, k, t(train), y(train));
    const PredictiveSummary p = model.predict(t(test), {0.95, 20, true});
    for (Eigen::Index i = 0; i < p.median.size(); ++i) {
      const double truth = y[test[static_cast<std::size_t>(i)]];
      covered += (p.lower[i] <= truth && truth <= p.upper[i]) ? 1 : 0;
      ++total;
    }
  }
  ASSERT_EQ(total, 10000);
  const double rate = static_cast<double>(covered) / static_cast<double>(total);
  RecordProperty("coverage", std::to_string(rate));
  EXPECT_NEAR(rate, 0.95, 0.03);
}
