#include "bcgp/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "bcgp/errors.hpp"

namespace bcgp {

namespace {

void check_object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (allowed.count(key) == 0) throw ConfigError(path + "." + key + ": unknown key");
  }
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing");
  if (!j.at(key).is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

template <typename F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json warping_to_json(const Warping& w) {
  json out = json::array();
  for (const auto& stage : w.stages()) {
    if (const auto* bc = std::get_if<BoxCox>(&stage)) {
      out.push_back({{"kind", "boxcox"}, {"params", {{"lambda", bc->lambda()}}}});
    } else {
      const auto& af = std::get<Affine>(stage);
      out.push_back({{"kind", "affine"}, {"params", {{"a", af.shift()}, {"b", af.scale()}}}});
    }
  }
  return out;
}

Warping warping_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected a list of stages");
  if (j.empty()) return Warping::identity();
  std::vector<WarpingStage> stages;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& s = j[i];
    check_object(s, p, {"kind", "params", "fixed"});
    if (!s.contains("kind") || !s["kind"].is_string()) throw ConfigError(p + ".kind: missing");
    const std::string kind = s["kind"];
    const json params = s.value("params", json::object());
    if (kind == "boxcox") {
      check_object(params, p + ".params", {"lambda"});
      stages.emplace_back(wrap(p, [&] { return BoxCox(number_at(params, "lambda", p + ".params")); }));
    } else if (kind == "affine") {
      check_object(params, p + ".params", {"a", "b"});
      const double a = params.contains("a") ? number_at(params, "a", p + ".params") : 0.0;
      const double b = params.contains("b") ? number_at(params, "b", p + ".params") : 1.0;
      stages.emplace_back(wrap(p, [&] { return Affine(a, b); }));
    } else {
      throw ConfigError(p + ".kind: unknown warping kind '" + kind + "' (expected boxcox|affine)");
    }
  }
  return Warping(std::move(stages));
}

json kernel_to_json(const Kernel& k) {
  json terms = json::array();
  for (const auto& term : k.terms()) {
    if (const auto* se = std::get_if<SquaredExponential>(&term)) {
      terms.push_back({{"type", "squared_exponential"},
                       {"variance", se->variance},
                       {"lengthscale", se->lengthscale}});
    } else if (const auto* sm = std::get_if<SpectralMixture>(&term)) {
      json comps = json::array();
      for (const auto& c : sm->components) {
        comps.push_back({{"weight", c.weight},
                         {"mean_frequency", c.mean_frequency},
                         {"variance", c.variance}});
      }
      terms.push_back({{"type", "spectral_mixture"}, {"components", comps}});
    } else {
      terms.push_back({{"type", "white_noise"}, {"variance", std::get<WhiteNoise>(term).variance}});
    }
  }
  return {{"terms", terms}};
}

Kernel kernel_from_json(const json& j, const std::string& path) {
  check_object(j, path, {"terms"});
  if (!j.contains("terms") || !j["terms"].is_array()) throw ConfigError(path + ".terms: missing");
  std::vector<KernelTerm> terms;
  for (std::size_t i = 0; i < j["terms"].size(); ++i) {
    const std::string p = path + ".terms[" + std::to_string(i) + "]";
    const json& t = j["terms"][i];
    if (!t.is_object() || !t.contains("type")) throw ConfigError(p + ".type: missing");
    const std::string type = t["type"];
    if (type == "squared_exponential") {
      check_object(t, p, {"type", "variance", "lengthscale"});
      terms.emplace_back(SquaredExponential{number_at(t, "variance", p), number_at(t, "lengthscale", p)});
    } else if (type == "spectral_mixture") {
      check_object(t, p, {"type", "components"});
      SpectralMixture sm;
      for (std::size_t q = 0; q < t.at("components").size(); ++q) {
        const std::string cp = p + ".components[" + std::to_string(q) + "]";
        const json& c = t["components"][q];
        check_object(c, cp, {"weight", "mean_frequency", "variance"});
        sm.components.push_back(
            {number_at(c, "weight", cp), number_at(c, "mean_frequency", cp), number_at(c, "variance", cp)});
      }
      terms.emplace_back(std::move(sm));
    } else if (type == "white_noise") {
      check_object(t, p, {"type", "variance"});
      terms.emplace_back(WhiteNoise{number_at(t, "variance", p)});
    } else {
      throw ConfigError(p + ".type: unknown kernel type '" + type + "'");
    }
  }
  return wrap(path, [&] { return Kernel(std::move(terms)); });
}

json mean_to_json(const MeanFunction& m) {
  if (m.is_constant()) return {{"type", "constant"}, {"value", m.value()}};
  return {{"type", "zero"}};
}

MeanFunction mean_from_json(const json& j, const std::string& path) {
  check_object(j, path, {"type", "value"});
  const std::string type = j.value("type", "");
  if (type == "zero") return MeanFunction::zero();
  if (type == "constant") return wrap(path, [&] { return MeanFunction::constant(number_at(j, "value", path)); });
  throw ConfigError(path + ".type: unknown mean type '" + type + "'");
}

json hyperparameters_to_json(const Hyperparameters& h) {
  return {{"warping", warping_to_json(h.warping)},
          {"mean", mean_to_json(h.mean)},
          {"kernel", kernel_to_json(h.kernel)}};
}

Hyperparameters hyperparameters_from_json(const json& j, const std::string& path) {
  const std::string p = path.empty() ? "" : path + ".";
  return {warping_from_json(j.at("warping"), p + "warping"), mean_from_json(j.at("mean"), p + "mean"),
          kernel_from_json(j.at("kernel"), p + "kernel")};
}

json model_to_json(const WarpedGpModel& model) {
  json j = hyperparameters_to_json({model.warping(), model.mean_function(), model.kernel()});
  j["format"] = "bcgp-model/1";
  j["train"] = {{"t", std::vector<double>(model.inputs().data(), model.inputs().data() + model.inputs().size())},
                {"y", std::vector<double>(model.observations().data(),
                                          model.observations().data() + model.observations().size())}};
  return j;
}

WarpedGpModel model_from_json(const json& j) {
  check_object(j, "model", {"format", "warping", "mean", "kernel", "train", "nll"});
  if (j.value("format", "") != "bcgp-model/1") throw ConfigError("model.format: expected bcgp-model/1");
  const Hyperparameters h = hyperparameters_from_json(j, "model");
  const auto t = j.at("train").at("t").get<std::vector<double>>();
  const auto y = j.at("train").at("y").get<std::vector<double>>();
  if (t.size() != y.size()) throw ConfigError("model.train: t and y differ in length");
  Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return make_model(h, tv, yv);
}

json scores_to_json(const Scores& s) { return {{"mae", s.mae}, {"mse", s.mse}, {"nlpd", s.nlpd}}; }

json summary_to_json(const ChainSummary& s, const std::vector<std::string>& names) {
  json params = json::object();
  for (std::size_t i = 0; i < s.parameters.size(); ++i) {
    const auto& p = s.parameters[i];
    params[i < names.size() ? names[i] : "theta" + std::to_string(i)] = {
        {"mean", p.mean}, {"sd", p.sd},   {"q025", p.q025}, {"q25", p.q25},
        {"q50", p.q50},   {"q75", p.q75}, {"q975", p.q975}};
  }
  return {{"burn_in_steps", s.burn_in_steps},
          {"pooled_samples", s.pooled_samples},
          {"parameters_unconstrained", params},
          {"map_log_prob", s.map_log_prob},
          {"map_step", s.map_step},
          {"map_walker", s.map_walker},
          {"map_sample", std::vector<double>(s.map_sample.data(), s.map_sample.data() + s.map_sample.size())},
          {"mean_acceptance", s.mean_acceptance}};
}

std::string predictions_to_csv(const PredictiveSummary& p) {
  std::ostringstream os;
  os << "t,median,lower,upper,mode,gh_mean,gh_var\n";
  for (Eigen::Index i = 0; i < p.inputs.size(); ++i) {
    const auto& mode = p.mode[static_cast<std::size_t>(i)];
    os << format_double(p.inputs[i]) << ',' << format_double(p.median[i]) << ','
       << format_double(p.lower[i]) << ',' << format_double(p.upper[i]) << ','
       << (mode ? format_double(*mode) : std::string()) << ',' << format_double(p.gh_mean[i]) << ','
       << format_double(p.gh_var[i]) << '\n';
  }
  return os.str();
}

json predictions_to_json(const PredictiveSummary& p) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json mode = json::array();
  for (const auto& m : p.mode) mode.push_back(m ? json(*m) : json(nullptr));
  return {{"level", p.level}, {"gh_points", p.gh_points}, {"t", vec(p.inputs)},
          {"median", vec(p.median)}, {"lower", vec(p.lower)}, {"upper", vec(p.upper)},
          {"mode", mode}, {"gh_mean", vec(p.gh_mean)}, {"gh_var", vec(p.gh_var)}};
}

std::string config_hash(const json& j) {
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bcgp
