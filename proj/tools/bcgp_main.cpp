// bcgp: command line front end for fitting and evaluating warped GPs.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bcgp/errors.hpp"
#include "bcgp/experiment.hpp"

namespace fs = std::filesystem;
using namespace bcgp;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// "a:b:n" -> n equally spaced points from a to b.
Eigen::VectorXd parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError("--grid: expected start:end:count, got '" + spec + "'");
  double a = 0;
  double b = 0;
  long n = 0;
  try {
    std::size_t pos = 0;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("");
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("");
    n = std::stol(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("");
  } catch (const std::logic_error&) {
    throw ConfigError("--grid: cannot parse '" + spec + "'");
  }
  if (n < 1) throw ConfigError("--grid: count must be >= 1");
  if (n == 1) return Eigen::VectorXd::Constant(1, a);
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

// Test inputs from a CSV column (first column named t, or --column).
Eigen::VectorXd read_inputs(const std::string& path, const std::string& column) {
  // load_csv wants a value column too; reuse the time column for both.
  return load_csv(path, column, column).times();
}

std::string trajectory_csv(const OptResult& r) {
  std::string out = "iteration,best_nll\n";
  for (const auto& p : r.trajectory) {
    out += std::to_string(p.iteration) + "," + format_double(p.value) + "\n";
  }
  return out;
}

std::string chain_csv(const McmcChain& c, const std::vector<std::string>& names) {
  std::string out = "step,walker,logp";
  for (const auto& n : names) out += "," + n;
  out += "\n";
  for (int s = 0; s < c.steps; ++s) {
    for (int k = 0; k < c.walkers; ++k) {
      out += std::to_string(s) + "," + std::to_string(k) + "," + format_double(c.log_prob(s, k));
      const Eigen::VectorXd x = c.sample(s, k);
      for (Eigen::Index d = 0; d < x.size(); ++d) out += "," + format_double(x[d]);
      out += "\n";
    }
  }
  return out;
}

// Post-burn-in samples in natural units: logp against every parameter.
std::string scatter_csv(const McmcChain& c, const ChainSummary& s, const ParamSpace& space) {
  std::string out = "logp";
  for (const auto& p : space.params()) out += "," + p.name;
  out += "\n";
  for (int step = s.burn_in_steps; step < c.steps; ++step) {
    for (int k = 0; k < c.walkers; ++k) {
      out += format_double(c.log_prob(step, k));
      const Eigen::VectorXd x = c.sample(step, k);
      for (std::size_t d = 0; d < space.dim(); ++d) {
        const double v = space.params()[d].transform == Transform::Log ? std::exp(x[static_cast<Eigen::Index>(d)])
                                                                       : x[static_cast<Eigen::Index>(d)];
        out += "," + format_double(v);
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<const RunConfig*> select_runs(const ExperimentConfig& cfg, const std::string& name) {
  std::vector<const RunConfig*> out;
  for (const auto& r : cfg.runs) {
    if (name.empty() || r.name == name) out.push_back(&r);
  }
  if (out.empty()) throw ConfigError("--run: no run named '" + name + "' in the config");
  return out;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string run;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.seed) override_seed(cfg, *c.seed);
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

int cmd_fit(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const TimeSeries series = load_csv(cfg.dataset.path, cfg.dataset.time_column, cfg.dataset.value_column);
  const Split sp = split(series, cfg.split);
  for (const RunConfig* run : select_runs(cfg, c.run)) {
    const auto start = std::chrono::steady_clock::now();
    FitResult fit;
    try {
      fit = fit_run(*run, sp.train, cfg.seed);
    } catch (const Error& e) {
      std::cerr << "fit '" << run->name << "': " << e.what() << "\n";
      throw;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path dir = fs::path(cfg.output_dir) / run->name;
    json report = fit_report(fit, sp.train);
    report["seed"] = cfg.seed;
    report["config_hash"] = config_hash(cfg.source);
    write_file(dir / "model.json", dump(model_to_json(fitted_model(fit, sp.train))));
    write_file(dir / "trajectory.csv", trajectory_csv(fit.opt));
    write_file(dir / "fit_report.json", dump(report));
    std::cerr << run->name << ": nll " << format_double(fit.nll) << ", " << fit.opt.evaluations
              << " evaluations, " << secs << " s\n";
  }
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string grid;
  std::string inputs;
  std::string column = "t";
  std::string format = "csv";
  std::string out;
  double level = 0.95;
  int gh_points = 20;
  bool latent_only = false;
};

WarpedGpModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("model '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

Eigen::VectorXd test_inputs(const std::string& grid, const std::string& inputs, const std::string& column) {
  if (grid.empty() == inputs.empty()) throw ConfigError("give exactly one of --grid or --inputs");
  return grid.empty() ? read_inputs(inputs, column) : parse_grid(grid);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

int cmd_predict(const PredictArgs& a) {
  const WarpedGpModel model = read_model(a.model);
  const Eigen::VectorXd t = test_inputs(a.grid, a.inputs, a.column);
  PredictOptions opts{a.level, a.gh_points, !a.latent_only};
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw ConfigError("--level: must lie in (0, 1)");
  PredictiveSummary p;
  try {
    p = model.predict(t, opts);
  } catch (const Error&) {
    // Find the offending input so the message names it.
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      try {
        model.predict(t.segment(i, 1), opts);
      } catch (const Error& e) {
        throw RangeError("prediction failed at t = " + format_double(t[i]) + ": " + e.what());
      }
    }
    throw;
  }
  emit(a.format == "json" ? dump(predictions_to_json(p)) : predictions_to_csv(p), a.out);
  return 0;
}

int cmd_evaluate(const Common& c) {
  ExperimentConfig cfg = load(c);
  if (!c.run.empty()) {
    const auto runs = select_runs(cfg, c.run);
    std::vector<RunConfig> kept;
    for (const auto* r : runs) kept.push_back(*r);
    cfg.runs = std::move(kept);
  }
  const Evaluation ev = evaluate(cfg);
  const fs::path dir(cfg.output_dir);
  write_file(dir / "report.json", dump(ev.report));
  for (const auto& re : ev.runs) {
    for (const auto& rr : re.regimes) {
      write_file(dir / ("predictions_" + re.fit.name + "_" + rr.regime + ".csv"), predictions_to_csv(rr.prediction));
    }
    write_file(dir / re.fit.name / "fit_report.json", dump(fit_report(re.fit, ev.split.train)));
  }
  std::cout << dump(ev.report);
  return 0;
}

int cmd_mcmc(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const TimeSeries series = load_csv(cfg.dataset.path, cfg.dataset.time_column, cfg.dataset.value_column);
  const Split sp = split(series, cfg.split);
  bool any = false;
  for (const RunConfig* run : select_runs(cfg, c.run)) {
    if (run->optimizer.method != "mcmc") {
      if (!c.run.empty()) throw ConfigError("run '" + run->name + "' does not use method \"mcmc\"");
      continue;
    }
    any = true;
    const FitResult fit = fit_run(*run, sp.train, cfg.seed);
    const ParamSpace space(fit.initial, run->model.fixed);
    const McmcChain& chain = *fit.chain;
    const fs::path dir = fs::path(cfg.output_dir) / run->name;
    json meta = {{"seed", chain.seed},
                 {"experiment_seed", cfg.seed},
                 {"walkers", chain.walkers},
                 {"steps", chain.steps},
                 {"dim", chain.dim},
                 {"stretch", chain.stretch},
                 {"burn_in", run->optimizer.burn_in},
                 {"parameter_names", fit.parameter_names},
                 {"config_hash", config_hash(cfg.source)}};
    write_file(dir / "chain.csv", chain_csv(chain, fit.parameter_names));
    write_file(dir / "chain.json", dump(meta));
    write_file(dir / "summary.json", dump(fit_report(fit, sp.train)));
    write_file(dir / "scatter.csv", scatter_csv(chain, *fit.summary, space));
    write_file(dir / "model.json", dump(model_to_json(fitted_model(fit, sp.train))));
    std::cerr << run->name << ": MAP log-prob " << format_double(fit.summary->map_log_prob)
              << ", mean acceptance " << fit.summary->mean_acceptance << "\n";
  }
  if (!any) throw ConfigError("config has no run with method \"mcmc\"");
  return 0;
}

struct SampleArgs {
  std::string model;
  std::string grid;
  std::string inputs;
  std::string column = "t";
  std::string out;
  long paths = 10;
  std::uint64_t seed = 0;
  bool latent_only = false;
};

int cmd_sample(const SampleArgs& a) {
  const WarpedGpModel model = read_model(a.model);
  const Eigen::VectorXd t = test_inputs(a.grid, a.inputs, a.column);
  if (a.paths < 1) throw ConfigError("--paths: must be >= 1");
  const Eigen::MatrixXd paths = model.sample_paths(t, a.paths, a.seed, !a.latent_only);
  std::string out = "t";
  for (long p = 0; p < a.paths; ++p) out += ",path" + std::to_string(p);
  out += "\n";
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    out += format_double(t[i]);
    for (Eigen::Index p = 0; p < paths.rows(); ++p) out += "," + format_double(paths(p, i));
    out += "\n";
  }
  emit(out, a.out);
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const Error*>(&e)) return 4;
  if (dynamic_cast<const json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-Cox warped Gaussian process toolkit"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_run) {
    sub->add_option("--config", common.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Override the config seed");
    sub->add_option("--out", common.out, "Output directory (overrides output_dir)");
    if (with_run) sub->add_option("--run", common.run, "Only this run");
  };

  auto* fit = app.add_subcommand("fit", "Fit every run (or --run) on the training split");
  add_common(fit, true);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Split, fit, predict and score every run");
  add_common(evaluate_cmd, true);
  auto* mcmc = app.add_subcommand("mcmc", "Run the ensemble sampler for mcmc runs");
  add_common(mcmc, true);

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Predictive summaries from a fitted model");
  predict->add_option("--model", pa.model, "model.json written by fit")->required()->check(CLI::ExistingFile);
  predict->add_option("--grid", pa.grid, "start:end:count");
  predict->add_option("--inputs", pa.inputs, "CSV with test inputs");
  predict->add_option("--column", pa.column, "Input column of --inputs")->capture_default_str();
  predict->add_option("--format", pa.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  predict->add_option("--out", pa.out, "Output file (default stdout)");
  predict->add_option("--level", pa.level, "Central interval probability")->capture_default_str();
  predict->add_option("--gh-points", pa.gh_points, "Gauss-Hermite nodes")->check(CLI::PositiveNumber)->capture_default_str();
  predict->add_flag("--latent-only", pa.latent_only, "Exclude observation noise");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Posterior sample paths from a fitted model");
  sample->add_option("--model", sa.model, "model.json written by fit")->required()->check(CLI::ExistingFile);
  sample->add_option("--grid", sa.grid, "start:end:count");
  sample->add_option("--inputs", sa.inputs, "CSV with test inputs");
  sample->add_option("--column", sa.column, "Input column of --inputs")->capture_default_str();
  sample->add_option("--paths", sa.paths, "Number of paths")->capture_default_str();
  sample->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
  sample->add_option("--out", sa.out, "Output file (default stdout)");
  sample->add_flag("--latent-only", sa.latent_only, "Exclude observation noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*fit) return cmd_fit(common);
    if (*evaluate_cmd) return cmd_evaluate(common);
    if (*mcmc) return cmd_mcmc(common);
    if (*predict) return cmd_predict(pa);
    if (*sample) return cmd_sample(sa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
