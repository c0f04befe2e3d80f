#include "bcgp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace fs = std::filesystem;

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (allowed.count(key) == 0) throw ConfigError(path + "." + key + ": unknown key");
  }
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
  return j.at(key);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<long>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

// number, or the string "auto" (-> nullopt)
std::optional<double> number_or_auto(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "auto") return std::nullopt;
  if (!j.is_number()) throw ConfigError(path + ": expected a number or \"auto\"");
  return j.get<double>();
}

KernelTermConfig parse_kernel_term(const json& j, const std::string& path) {
  KernelTermConfig k;
  const std::string type = get_string(require(j, "type", path), path + ".type");
  if (type == "squared_exponential") {
    check_keys(j, path, {"type", "variance", "lengthscale"});
    k.type = KernelTermConfig::Type::SquaredExponential;
    if (j.contains("variance")) k.variance = number_or_auto(j["variance"], path + ".variance");
    if (j.contains("lengthscale")) k.lengthscale = number_or_auto(j["lengthscale"], path + ".lengthscale");
  } else if (type == "spectral_mixture") {
    check_keys(j, path, {"type", "components"});
    k.type = KernelTermConfig::Type::SpectralMixture;
    const json& c = require(j, "components", path);
    if (c.is_number_integer()) {
      k.components = c.get<int>();
      if (k.components < 1) throw ConfigError(path + ".components: must be >= 1");
    } else if (c.is_array() && !c.empty()) {
      for (std::size_t q = 0; q < c.size(); ++q) {
        const std::string cp = path + ".components[" + std::to_string(q) + "]";
        check_keys(c[q], cp, {"weight", "mean_frequency", "variance"});
        k.spectral.push_back({get_number(require(c[q], "weight", cp), cp + ".weight"),
                              get_number(require(c[q], "mean_frequency", cp), cp + ".mean_frequency"),
                              get_number(require(c[q], "variance", cp), cp + ".variance")});
      }
      k.components = static_cast<int>(k.spectral.size());
    } else {
      throw ConfigError(path + ".components: expected a count or a list of components");
    }
  } else {
    throw ConfigError(path + ".type: unknown kernel type '" + type +
                      "' (expected squared_exponential|spectral_mixture)");
  }
  return k;
}

ModelConfig parse_model(const json& j, const std::string& path) {
  check_keys(j, path, {"warping", "kernel", "noise", "mean", "fixed"});
  ModelConfig m;
  const json warping = j.value("warping", json::array());
  m.warping = warping_from_json(warping, path + ".warping");
  if (!warping.empty()) {
    for (std::size_t i = 0; i < warping.size(); ++i) {
      if (!warping[i].contains("fixed")) continue;
      const json& f = warping[i]["fixed"];
      const std::string fp = path + ".warping[" + std::to_string(i) + "].fixed";
      if (!f.is_array()) throw ConfigError(fp + ": expected a list of parameter names");
      for (const auto& name : f) {
        m.fixed.insert("warping." + std::to_string(i) + "." + get_string(name, fp));
      }
    }
  } else {
    // Identity warping of a plain GP carries no parameters.
    m.fixed.insert({"warping.0.a", "warping.0.b"});
  }

  const json& kernel = require(j, "kernel", path);
  if (kernel.is_array()) {
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      m.kernel.push_back(parse_kernel_term(kernel[i], path + ".kernel[" + std::to_string(i) + "]"));
    }
  } else {
    m.kernel.push_back(parse_kernel_term(kernel, path + ".kernel"));
  }
  if (j.contains("noise")) m.noise = number_or_auto(j["noise"], path + ".noise");

  if (j.contains("mean")) {
    const json& mj = j["mean"];
    check_keys(mj, path + ".mean", {"type", "value"});
    const std::string type = get_string(require(mj, "type", path + ".mean"), path + ".mean.type");
    if (type == "zero") {
      m.constant_mean = false;
    } else if (type == "constant") {
      if (mj.contains("value")) m.mean_value = number_or_auto(mj["value"], path + ".mean.value");
    } else {
      throw ConfigError(path + ".mean.type: unknown mean type '" + type + "'");
    }
  }
  if (j.contains("fixed")) {
    const json& f = j["fixed"];
    if (!f.is_array()) throw ConfigError(path + ".fixed: expected a list of parameter names");
    for (const auto& name : f) m.fixed.insert(get_string(name, path + ".fixed"));
  }
  return m;
}

OptimizerConfig parse_optimizer(const json& j, const std::string& path) {
  check_keys(j, path,
             {"method", "rounds", "tol", "max_iter", "gtol", "ftol", "bfgs_max_iter", "walkers",
              "steps", "stretch", "burn_in", "init_radius", "threads", "prior_log_bound",
              "prior_raw_bound"});
  OptimizerConfig o;
  o.method = get_string(require(j, "method", path), path + ".method");
  static const std::set<std::string> methods{"none", "bfgs", "powell", "bfgs-powell", "mcmc"};
  if (methods.count(o.method) == 0) {
    throw ConfigError(path + ".method: unknown method '" + o.method +
                      "' (expected none|bfgs|powell|bfgs-powell|mcmc)");
  }
  if (j.contains("rounds")) o.rounds = static_cast<int>(get_integer(j["rounds"], path + ".rounds"));
  if (o.rounds < 1) throw ConfigError(path + ".rounds: must be >= 1");
  if (j.contains("tol")) o.powell.tol = get_number(j["tol"], path + ".tol");
  if (j.contains("max_iter")) o.powell.max_iter = static_cast<int>(get_integer(j["max_iter"], path + ".max_iter"));
  if (j.contains("gtol")) o.bfgs.gtol = get_number(j["gtol"], path + ".gtol");
  if (j.contains("ftol")) o.bfgs.ftol = get_number(j["ftol"], path + ".ftol");
  if (j.contains("bfgs_max_iter")) {
    o.bfgs.max_iter = static_cast<int>(get_integer(j["bfgs_max_iter"], path + ".bfgs_max_iter"));
  }
  if (j.contains("walkers")) o.mcmc.walkers = static_cast<int>(get_integer(j["walkers"], path + ".walkers"));
  if (j.contains("steps")) o.mcmc.steps = static_cast<int>(get_integer(j["steps"], path + ".steps"));
  if (j.contains("stretch")) o.mcmc.stretch = get_number(j["stretch"], path + ".stretch");
  if (j.contains("threads")) o.mcmc.threads = static_cast<unsigned>(get_integer(j["threads"], path + ".threads"));
  if (j.contains("burn_in")) o.burn_in = get_number(j["burn_in"], path + ".burn_in");
  if (j.contains("init_radius")) o.init_radius = get_number(j["init_radius"], path + ".init_radius");
  if (j.contains("prior_log_bound")) o.prior.log_bound = get_number(j["prior_log_bound"], path + ".prior_log_bound");
  if (j.contains("prior_raw_bound")) o.prior.raw_bound = get_number(j["prior_raw_bound"], path + ".prior_raw_bound");
  if (!(o.burn_in >= 0.0 && o.burn_in < 1.0)) throw ConfigError(path + ".burn_in: must lie in [0, 1)");
  if (!(o.mcmc.stretch > 1.0)) throw ConfigError(path + ".stretch: must exceed 1");
  if (o.mcmc.steps < 1) throw ConfigError(path + ".steps: must be >= 1");
  return o;
}

SplitSpec parse_split(const json& j, const std::string& path) {
  SplitSpec s;
  const std::string mode = get_string(require(j, "mode", path), path + ".mode");
  if (mode == "reconstruct_forecast") {
    check_keys(j, path, {"mode", "window", "train_count"});
    const json& w = require(j, "window", path);
    if (!w.is_array() || w.size() != 2) throw ConfigError(path + ".window: expected [start, end]");
    ReconstructForecast rf;
    rf.window_start = get_number(w[0], path + ".window[0]");
    rf.window_end = get_number(w[1], path + ".window[1]");
    if (!(rf.window_start <= rf.window_end)) throw ConfigError(path + ".window: start must not exceed end");
    rf.train_count = get_integer(require(j, "train_count", path), path + ".train_count");
    s.mode = rf;
  } else if (mode == "random") {
    check_keys(j, path, {"mode", "train_count", "fraction"});
    RandomFraction rnd;
    if (j.contains("train_count")) rnd.train_count = get_integer(j["train_count"], path + ".train_count");
    if (j.contains("fraction")) rnd.fraction = get_number(j["fraction"], path + ".fraction");
    if (rnd.train_count <= 0 && !(rnd.fraction > 0.0 && rnd.fraction <= 1.0)) {
      throw ConfigError(path + ": random split needs train_count >= 1 or fraction in (0, 1]");
    }
    s.mode = rnd;
  } else {
    throw ConfigError(path + ".mode: unknown split mode '" + mode + "' (expected reconstruct_forecast|random)");
  }
  return s;
}

constexpr double kPeakSeparation = 3.0;

double sample_variance(const Eigen::VectorXd& x) {
  if (x.size() < 2) return 1.0;
  const double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
  check_keys(j, "config", {"dataset", "split", "seed", "prediction", "output_dir", "runs"});
  ExperimentConfig cfg;
  cfg.source = j;

  const json& ds = require(j, "dataset", "config");
  check_keys(ds, "config.dataset", {"path", "time_column", "value_column"});
  cfg.dataset.path = get_string(require(ds, "path", "config.dataset"), "config.dataset.path");
  if (fs::path(cfg.dataset.path).is_relative()) {
    cfg.dataset.path = (fs::path(base_dir) / cfg.dataset.path).lexically_normal().string();
  }
  cfg.dataset.time_column = get_string(require(ds, "time_column", "config.dataset"), "config.dataset.time_column");
  cfg.dataset.value_column = get_string(require(ds, "value_column", "config.dataset"), "config.dataset.value_column");

  cfg.split = parse_split(require(j, "split", "config"), "config.split");
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.split.seed = cfg.seed;

  if (j.contains("prediction")) {
    const json& p = j["prediction"];
    check_keys(p, "config.prediction", {"gh_points", "level", "include_noise"});
    if (p.contains("gh_points")) cfg.prediction.gh_points = static_cast<int>(get_integer(p["gh_points"], "config.prediction.gh_points"));
    if (p.contains("level")) cfg.prediction.level = get_number(p["level"], "config.prediction.level");
    if (p.contains("include_noise")) {
      if (!p["include_noise"].is_boolean()) throw ConfigError("config.prediction.include_noise: expected a boolean");
      cfg.prediction.include_noise = p["include_noise"].get<bool>();
    }
    if (cfg.prediction.gh_points < 1) throw ConfigError("config.prediction.gh_points: must be >= 1");
    if (!(cfg.prediction.level > 0.0 && cfg.prediction.level < 1.0)) {
      throw ConfigError("config.prediction.level: must lie in (0, 1)");
    }
  }
  if (j.contains("output_dir")) cfg.output_dir = get_string(j["output_dir"], "config.output_dir");

  const json& runs = require(j, "runs", "config");
  if (!runs.is_array() || runs.empty()) throw ConfigError("config.runs: expected a non-empty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string p = "config.runs[" + std::to_string(i) + "]";
    check_keys(runs[i], p, {"name", "model", "optimizer"});
    RunConfig r;
    r.name = get_string(require(runs[i], "name", p), p + ".name");
    if (!names.insert(r.name).second) throw ConfigError(p + ".name: duplicate run name '" + r.name + "'");
    r.model = parse_model(require(runs[i], "model", p), p + ".model");
    r.optimizer = parse_optimizer(require(runs[i], "optimizer", p), p + ".optimizer");
    // Surface unknown fixed names and structural problems now, not mid-run.
    try {
      Hyperparameters probe{r.model.warping, r.model.constant_mean ? MeanFunction::constant(0.0) : MeanFunction{},
                            Kernel{}};
      std::vector<KernelTerm> terms;
      for (const auto& kt : r.model.kernel) {
        if (kt.type == KernelTermConfig::Type::SquaredExponential) {
          terms.emplace_back(SquaredExponential{});
        } else {
          terms.emplace_back(SpectralMixture{std::vector<SpectralComponent>(static_cast<std::size_t>(kt.components))});
        }
      }
      terms.emplace_back(WhiteNoise{1.0});
      probe.kernel = Kernel(std::move(terms));
      ParamSpace(probe, r.model.fixed);
    } catch (const ArgumentError& e) {
      throw ConfigError(p + ".model: " + e.what());
    }
    cfg.runs.push_back(std::move(r));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.split.seed = seed;
  cfg.source["seed"] = seed;
}

std::uint64_t mcmc_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL; }

Eigen::VectorXd lomb_scargle(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& freqs) {
  const Eigen::ArrayXd xc = x.array() - x.mean();
  Eigen::VectorXd power(freqs.size());
  for (Eigen::Index k = 0; k < freqs.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * freqs[k];
    const double s2 = (2.0 * w * t.array()).sin().sum();
    const double c2 = (2.0 * w * t.array()).cos().sum();
    const double tau = std::atan2(s2, c2) / (2.0 * w);
    const Eigen::ArrayXd arg = w * (t.array() - tau);
    const Eigen::ArrayXd c = arg.cos();
    const Eigen::ArrayXd s = arg.sin();
    const double cc = c.square().sum();
    const double ss = s.square().sum();
    const double xcos = (xc * c).sum();
    const double xsin = (xc * s).sum();
    power[k] = 0.5 * ((cc > 0 ? xcos * xcos / cc : 0.0) + (ss > 0 ? xsin * xsin / ss : 0.0));
  }
  return power;
}

Hyperparameters initial_hyperparameters(const ModelConfig& model, const TimeSeries& train) {
  if (train.size() < 2) throw ArgumentError("need at least two training points");
  Eigen::VectorXd x(train.size());
  for (Eigen::Index i = 0; i < train.size(); ++i) x[i] = model.warping.forward(train.values()[i]);
  const double var = sample_variance(x);
  const Eigen::VectorXd& t = train.times();
  const double span = t[t.size() - 1] - t[0];

  std::vector<KernelTerm> terms;
  for (const auto& kt : model.kernel) {
    if (kt.type == KernelTermConfig::Type::SquaredExponential) {
      terms.emplace_back(SquaredExponential{kt.variance.value_or(var), kt.lengthscale.value_or(span / 10.0)});
      continue;
    }
    if (!kt.spectral.empty()) {
      terms.emplace_back(SpectralMixture{kt.spectral});
      continue;
    }
    // Periodogram peaks seed the mean frequencies; the weights share the
    // signal variance and the spectral variance gives a correlation length
    // of about span / (2 pi). Neighbouring peaks closer than a few frequency
    // resolutions (1/span) are usually one broad feature, so they are skipped.
    double min_dt = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < t.size(); ++i) min_dt = std::min(min_dt, t[i] - t[i - 1]);
    const double f_lo = 1.0 / span;
    const double f_hi = 0.5 / min_dt;
    const double df = 1.0 / (4.0 * span);
    const auto nf = static_cast<Eigen::Index>(std::max(8.0, std::floor((f_hi - f_lo) / df)) + 1);
    const Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(nf, f_lo, f_hi);
    const Eigen::VectorXd power = lomb_scargle(t, x, freqs);
    std::vector<std::pair<double, double>> peaks;  // (power, frequency)
    for (Eigen::Index k = 0; k < nf; ++k) {
      const bool left = k == 0 || power[k] > power[k - 1];
      const bool right = k == nf - 1 || power[k] >= power[k + 1];
      if (left && right) peaks.emplace_back(power[k], freqs[k]);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> chosen;
    for (const auto& pk : peaks) {
      if (static_cast<int>(chosen.size()) == kt.components) break;
      bool ok = true;
      for (double c : chosen) ok = ok && std::abs(c - pk.second) >= kPeakSeparation * f_lo;
      if (ok) chosen.push_back(pk.second);
    }
    SpectralMixture sm;
    for (int q = 0; q < kt.components; ++q) {
      const double f = q < static_cast<int>(chosen.size()) ? chosen[static_cast<std::size_t>(q)]
                                                            : f_lo * (q + 1);
      sm.components.push_back({var / kt.components, f, f_lo * f_lo});
    }
    terms.emplace_back(std::move(sm));
  }
  terms.emplace_back(WhiteNoise{model.noise.value_or(0.1 * var)});

  Hyperparameters h;
  h.warping = model.warping;
  h.mean = model.constant_mean ? MeanFunction::constant(model.mean_value.value_or(x.mean())) : MeanFunction{};
  h.kernel = Kernel(std::move(terms));
  return h;
}

FitResult fit_run(const RunConfig& run, const TimeSeries& train, std::uint64_t seed) {
  FitResult out;
  out.name = run.name;
  out.method = run.optimizer.method;
  out.initial = initial_hyperparameters(run.model, train);
  const ParamSpace space(out.initial, run.model.fixed);
  out.parameter_names = space.names();
  const Eigen::VectorXd theta0 = space.encode(out.initial);
  const Objective nll = nll_objective(space, train.times(), train.values());
  const auto& o = run.optimizer;

  if (o.method == "none") {
    out.opt.x = theta0;
    out.opt.value = nll(theta0);
    out.opt.evaluations = 1;
    out.opt.termination = "not optimised";
    out.opt.trajectory.push_back({0, out.opt.value});
  } else if (o.method == "bfgs") {
    out.opt = bfgs_minimize(nll, theta0, o.bfgs);
  } else if (o.method == "powell") {
    out.opt = powell_minimize(nll, theta0, o.powell);
  } else if (o.method == "bfgs-powell") {
    out.opt = bfgs_powell(nll, theta0, {o.rounds, o.bfgs, o.powell});
  } else {
    McmcOptions mo = o.mcmc;
    mo.seed = mcmc_seed(seed);
    const LogProb logp = log_posterior(space, train.times(), train.values(), o.prior);
    out.chain = ensemble_mcmc(logp, theta0, o.init_radius, mo);
    out.summary = chain_summary(*out.chain, o.burn_in);
    out.opt.x = out.summary->map_sample;
    out.opt.value = -out.summary->map_log_prob;
    out.opt.evaluations = static_cast<long>(mo.walkers) * (mo.steps + 1);
    out.opt.termination = "mcmc: highest-posterior sample";
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < out.chain->steps; ++s) {
      best = std::min(best, -out.chain->log_prob.row(s).maxCoeff());
      out.opt.trajectory.push_back({s, best});
    }
  }
  if (!std::isfinite(out.opt.value)) {
    throw NumericError("run '" + run.name + "': optimiser ended at a non-finite NLL", out.opt.value);
  }
  out.fitted = space.decode(out.opt.x);
  out.nll = out.opt.value;
  return out;
}

WarpedGpModel fitted_model(const FitResult& fit, const TimeSeries& train) {
  return make_model(fit.fitted, train.times(), train.values());
}

json fit_report(const FitResult& fit, const TimeSeries& train) {
  json j;
  j["run"] = fit.name;
  j["method"] = fit.method;
  j["nll"] = fit.nll;
  j["evaluations"] = fit.opt.evaluations;
  j["termination"] = fit.opt.termination;
  j["n_train"] = train.size();
  j["parameter_names"] = fit.parameter_names;
  j["theta"] = std::vector<double>(fit.opt.x.data(), fit.opt.x.data() + fit.opt.x.size());
  j["initial"] = hyperparameters_to_json(fit.initial);
  j["fitted"] = hyperparameters_to_json(fit.fitted);
  if (fit.summary) j["mcmc"] = summary_to_json(*fit.summary, fit.parameter_names);
  return j;
}

namespace {

// Rethrows the active library error as the same type with `stage` in front.
[[noreturn]] void relabel(const std::string& stage) {
  try {
    throw;
  } catch (const NumericError& e) {
    throw NumericError(stage + ": " + e.what(), e.residual());
  } catch (const ConditioningError& e) {
    throw ConditioningError(stage + ": " + e.what(), e.attempted_jitter());
  } catch (const ArgumentError& e) {
    throw ArgumentError(stage + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(stage + ": " + e.what());
  } catch (const SingularityError& e) {
    throw SingularityError(stage + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(stage + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  }
}

}  // namespace

Evaluation evaluate(const ExperimentConfig& cfg) {
  Evaluation ev;
  const TimeSeries series = load_csv(cfg.dataset.path, cfg.dataset.time_column, cfg.dataset.value_column);
  ev.split = split(series, cfg.split);

  json regimes = json::object();
  for (const auto& run : cfg.runs) {
    RunEvaluation re;
    try {
      re.fit = fit_run(run, ev.split.train, cfg.seed);
    } catch (const Error&) {
      relabel("run '" + run.name + "', fit");
    }
    const WarpedGpModel model = fitted_model(re.fit, ev.split.train);
    for (const auto& [name, test] : {std::pair<std::string, const TimeSeries*>{"reconstruct", &ev.split.reconstruct},
                                     std::pair<std::string, const TimeSeries*>{"forecast", &ev.split.forecast}}) {
      if (test->empty()) continue;
      RegimeResult rr;
      rr.regime = name;
      rr.test = *test;
      try {
        rr.prediction = model.predict(test->times(), cfg.prediction);
        const Eigen::VectorXd logd = model.predictive_log_density(test->times(), test->values());
        rr.scores = score(test->values(), rr.prediction.median, logd);
        rr.scores_gh_mean = score(test->values(), rr.prediction.gh_mean, logd);
      } catch (const Error&) {
        relabel("run '" + run.name + "', " + name + " predict/score");
      }

      json row = scores_to_json(rr.scores);
      row["nll"] = re.fit.nll;
      row["mae_gh_mean"] = rr.scores_gh_mean.mae;
      row["mse_gh_mean"] = rr.scores_gh_mean.mse;
      regimes[name]["n_test"] = test->size();
      regimes[name]["rows"][run.name] = row;
      re.regimes.push_back(std::move(rr));
    }
    ev.runs.push_back(std::move(re));
  }
  ev.report = {{"seed", cfg.seed},
               {"config_hash", config_hash(cfg.source)},
               {"n_train", ev.split.train.size()},
               {"point_prediction", "median"},
               {"regimes", regimes}};
  return ev;
}

}  // namespace bcgp
