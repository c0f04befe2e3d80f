// Python bindings for the core library.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bcgp/errors.hpp"
#include "bcgp/experiment.hpp"

namespace py = pybind11;
using namespace bcgp;

namespace {

json to_json(const py::handle& obj) {
  py::module_ pyjson = py::module_::import("json");
  return json::parse(pyjson.attr("dumps")(obj).cast<std::string>());
}

py::object from_json(const json& j) {
  py::module_ pyjson = py::module_::import("json");
  return pyjson.attr("loads")(j.dump());
}

py::dict summary_dict(const PredictiveSummary& p) {
  py::dict d;
  d["t"] = p.inputs;
  d["median"] = p.median;
  d["lower"] = p.lower;
  d["upper"] = p.upper;
  d["mode"] = p.mode;
  d["gh_mean"] = p.gh_mean;
  d["gh_var"] = p.gh_var;
  d["latent_mean"] = p.latent_mean;
  d["latent_sd"] = p.latent_sd;
  d["level"] = p.level;
  d["gh_points"] = p.gh_points;
  return d;
}

py::dict opt_dict(const OptResult& r) {
  py::dict d;
  d["x"] = r.x;
  d["value"] = r.value;
  d["termination"] = r.termination;
  d["evaluations"] = r.evaluations;
  py::list traj;
  for (const auto& p : r.trajectory) traj.append(py::make_tuple(p.iteration, p.value));
  d["trajectory"] = traj;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bcgp, m) {
  m.doc() = "Box-Cox warped Gaussian processes";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  py::class_<Warping>(m, "Warping")
      .def_static("identity", &Warping::identity)
      .def_static("box_cox", &Warping::box_cox, py::arg("lam"))
      .def_static("affine", &Warping::affine, py::arg("shift"), py::arg("scale"))
      .def_static("from_json", [](const py::object& spec) { return warping_from_json(to_json(spec)); })
      .def("to_json", [](const Warping& w) { return from_json(warping_to_json(w)); })
      .def("forward", &Warping::forward)
      .def("inverse", &Warping::inverse)
      .def("log_abs_deriv", &Warping::log_abs_deriv)
      .def("forward", [](const Warping& w, const Eigen::VectorXd& y) {
        return Eigen::VectorXd(y.unaryExpr([&](double v) { return w.forward(v); }));
      })
      .def("inverse", [](const Warping& w, const Eigen::VectorXd& x) {
        return Eigen::VectorXd(x.unaryExpr([&](double v) { return w.inverse(v); }));
      })
      .def("then", [](const Warping& a, const Warping& b) { return compose({a, b}); },
           "Composition applying self first, then other.")
      .def("__len__", &Warping::size);

  m.def("compose", [](const std::vector<Warping>& parts) { return compose(parts); });
  m.def("invert_numeric", &invert_numeric, py::arg("warping"), py::arg("x"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 200);

  py::class_<Kernel>(m, "Kernel")
      .def_static("from_json", [](const py::object& spec) { return kernel_from_json(to_json(spec)); })
      .def_static("squared_exponential",
                  [](double variance, double lengthscale, double noise) {
                    std::vector<KernelTerm> terms{SquaredExponential{variance, lengthscale}};
                    if (noise > 0) terms.emplace_back(WhiteNoise{noise});
                    return Kernel(std::move(terms));
                  },
                  py::arg("variance"), py::arg("lengthscale"), py::arg("noise") = 0.0)
      .def("to_json", [](const Kernel& k) { return from_json(kernel_to_json(k)); })
      .def("__call__", [](const Kernel& k, double tau) { return k(tau); })
      .def_property_readonly("noise_variance", &Kernel::noise_variance);

  py::class_<MeanFunction>(m, "MeanFunction")
      .def_static("zero", &MeanFunction::zero)
      .def_static("constant", &MeanFunction::constant)
      .def_property_readonly("value", &MeanFunction::value);

  m.def("gram", py::overload_cast<const Kernel&, const Eigen::VectorXd&>(&gram));
  m.def("nll_gaussian", &nll_gaussian);
  m.def("gauss_hermite", [](int k) {
    const GaussHermiteRule r = gauss_hermite(k);
    return py::make_tuple(r.nodes, r.weights);
  });

  py::class_<WarpedGpModel>(m, "WarpedGP")
      .def(py::init<Warping, MeanFunction, Kernel, Eigen::VectorXd, Eigen::VectorXd>(), py::arg("warping"),
           py::arg("mean"), py::arg("kernel"), py::arg("t"), py::arg("y"))
      .def_static("from_json", [](const py::object& spec) { return model_from_json(to_json(spec)); })
      .def("to_json", [](const WarpedGpModel& mdl) { return from_json(model_to_json(mdl)); })
      .def("nll", &WarpedGpModel::nll)
      .def(
          "predict",
          [](const WarpedGpModel& mdl, const Eigen::VectorXd& t, double level, int gh_points, bool include_noise) {
            return summary_dict(mdl.predict(t, {level, gh_points, include_noise}));
          },
          py::arg("t"), py::arg("level") = 0.95, py::arg("gh_points") = 20, py::arg("include_noise") = true)
      .def("log_density",
           py::overload_cast<const Eigen::VectorXd&, const Eigen::VectorXd&>(&WarpedGpModel::predictive_log_density,
                                                                               py::const_),
           py::arg("t"), py::arg("y"))
      .def("sample_paths", &WarpedGpModel::sample_paths, py::arg("t"), py::arg("n_paths"), py::arg("seed"),
           py::arg("include_noise") = true)
      .def_property_readonly("warping", &WarpedGpModel::warping)
      .def_property_readonly("kernel", &WarpedGpModel::kernel);

  m.def(
      "powell_minimize",
      [](const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0, double tol, int max_iter) {
        PowellOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        return opt_dict(powell_minimize(f, x0, o));
      },
      py::arg("f"), py::arg("x0"), py::arg("tol") = 1e-10, py::arg("max_iter") = 200);
  m.def(
      "bfgs_minimize",
      [](const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0, double gtol, int max_iter) {
        BfgsOptions o;
        o.gtol = gtol;
        o.max_iter = max_iter;
        return opt_dict(bfgs_minimize(f, x0, o));
      },
      py::arg("f"), py::arg("x0"), py::arg("gtol") = 1e-6, py::arg("max_iter") = 500);
  m.def(
      "bfgs_powell",
      [](const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0, int rounds) {
        BfgsPowellOptions o;
        o.rounds = rounds;
        return opt_dict(bfgs_powell(f, x0, o));
      },
      py::arg("f"), py::arg("x0"), py::arg("rounds") = 2);
  m.def(
      "ensemble_mcmc",
      [](const std::function<double(const Eigen::VectorXd&)>& logp, const Eigen::VectorXd& center, double radius,
         int walkers, int steps, double stretch, std::uint64_t seed) {
        McmcOptions o{walkers, steps, stretch, seed, 1};
        // logp calls back into Python, so the GIL stays held and threads = 1.
        const McmcChain c = ensemble_mcmc(logp, center, radius, o);
        const auto n = static_cast<py::ssize_t>(c.dim);
        py::array_t<double> samples({static_cast<py::ssize_t>(c.steps), static_cast<py::ssize_t>(c.walkers), n});
        std::copy(c.samples.begin(), c.samples.end(), samples.mutable_data());
        py::dict d;
        d["samples"] = samples;
        d["log_prob"] = c.log_prob;
        d["acceptance"] = c.acceptance;
        return d;
      },
      py::arg("logp"), py::arg("center"), py::arg("radius") = 0.1, py::arg("walkers") = 32, py::arg("steps") = 1000,
      py::arg("stretch") = 2.0, py::arg("seed") = 0);

  m.def("load_csv", [](const std::string& path, const std::string& tcol, const std::string& vcol) {
    const TimeSeries s = load_csv(path, tcol, vcol);
    return py::make_tuple(s.times(), s.values());
  });
  m.def("score", [](const Eigen::VectorXd& y, const Eigen::VectorXd& yp, const Eigen::VectorXd& logd) {
    return from_json(scores_to_json(score(y, yp, logd)));
  });
  m.def(
      "evaluate",
      [](const std::string& config_path, std::optional<std::uint64_t> seed) {
        ExperimentConfig cfg = load_config(config_path);
        if (seed) override_seed(cfg, *seed);
        return from_json(evaluate(cfg).report);
      },
      py::arg("config"), py::arg("seed") = py::none(),
      "Runs split, fit, predict and score for every run of a config file; returns the report.");
}
