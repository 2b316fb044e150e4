#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rmc/config.hpp"
#include "rmc/controller.hpp"
#include "rmc/diagnostics.hpp"
#include "rmc/sdu.hpp"
#include "rmc/simulator.hpp"

namespace py = pybind11;
using namespace rmc;

namespace {

// Samples x components, one row per logged sample.
template <class Get>
Mat stack(const TrajectoryLog& log, Get get) {
  if (log.samples.empty()) return {};
  Mat out(static_cast<Eigen::Index>(log.size()), get(log.samples.front()).size());
  for (std::size_t k = 0; k < log.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = get(log.samples[k]).transpose();
  return out;
}

Scenario scenario_from(const std::filesystem::path& config, std::optional<double> T, std::optional<double> dt) {
  ScenarioConfig cfg = load_config(config);
  if (T) cfg.T = *T;
  if (dt) cfg.dt = *dt;
  cfg.validate();
  return make_scenario(cfg);
}

py::dict log_dict(const TrajectoryLog& log) {
  std::vector<double> t;
  for (const auto& s : log.samples) t.push_back(s.t);
  py::dict d;
  d["t"] = Vec(Eigen::Map<const Vec>(t.data(), static_cast<Eigen::Index>(t.size())));
  d["X"] = stack(log, [](const LogSample& s) -> const Vec& { return s.X; });
  d["xr"] = stack(log, [](const LogSample& s) -> const Vec& { return s.xr.front(); });
  d["e1"] = stack(log, [](const LogSample& s) -> const Vec& { return s.e.front(); });
  d["en"] = stack(log, [](const LogSample& s) -> const Vec& { return s.e.back(); });
  d["r"] = stack(log, [](const LogSample& s) -> const Vec& { return s.r; });
  d["tau"] = stack(log, [](const LogSample& s) -> const Vec& { return s.tau; });
  d["pi"] = stack(log, [](const LogSample& s) -> const Vec& { return s.pi; });
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust multivariable control: decomposition, simulation and analysis";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::exception<SingularMinor>(m, "SingularMinor", numerical.ptr());
  // Registered after the base class so it wins; attaches the minor index.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SingularMinor& e) {
      const py::object type = py::module_::import("rmc._core").attr("SingularMinor");
      py::object err = type(e.what());
      err.attr("index") = e.index();
      PyErr_SetObject(type.ptr(), err.ptr());
    }
  });

  m.def("cascade_coefficients", [](std::size_t n) {
    const CascadeCoefficients c(n);
    std::vector<std::vector<std::uint64_t>> rows;
    for (std::size_t i = 1; i <= n; ++i) rows.push_back(c.row(i));
    return rows;
  }, py::arg("n"), "Rows a(i, 0..i-1) of the error cascade, i = 1..n.");

  m.def("leading_minors", &leading_minors, py::arg("g"));
  m.def("sign_matrix", &sign_matrix, py::arg("g"), "Diagonal of D as a vector of +-1.");
  m.def("ldu_pivots", &ldu_pivots, py::arg("g"));
  m.def("sdu_decompose", [](const Mat& g) {
    const SduFactors f = sdu_decompose(g);
    return py::make_tuple(f.S, Mat(f.D.asDiagonal()), f.U);
  }, py::arg("g"), "Returns (S, D, U) with g = S D U.");

  m.def("compose_K", &compose_K, py::arg("kp"), py::arg("kd"));
  m.def("minimal_C", [](const Vec& zeta_nbar, const Mat& zeta_omega, double gamma1, double gamma2, const Vec& alpha) {
    BoundEstimates b{zeta_nbar, zeta_omega, gamma1, gamma2};
    b.validate(static_cast<std::size_t>(alpha.size()));
    return minimal_C(b, alpha);
  }, py::arg("zeta_nbar"), py::arg("zeta_omega"), py::arg("gamma1"), py::arg("gamma2"), py::arg("alpha"));

  m.def("two_link_inertia", [](double q2) { return two_link_inertia(q2); }, py::arg("q2"));
  m.def("two_link_accel", [](const Vec& q, const Vec& qdot, const Vec& tau) { return two_link_accel(q, qdot, tau); },
        py::arg("q"), py::arg("qdot"), py::arg("tau"));

  m.def("run_scenario", [](const std::filesystem::path& config, std::optional<double> T, std::optional<double> dt) {
    const Scenario sc = scenario_from(config, T, dt);
    TrajectoryLog log;
    {
      py::gil_scoped_release release;
      log = run_scenario(sc);
    }
    return log_dict(log);
  }, py::arg("config"), py::arg("T") = py::none(), py::arg("dt") = py::none(),
     "Simulates a configuration file. Arrays are samples x components, angles in rad.");

  m.def("diagnose", [](const std::filesystem::path& config, std::optional<double> T) {
    const ScenarioConfig cfg = load_config(config);
    const Scenario sc = scenario_from(config, T, std::nullopt);
    DiagnosticsOptions opts;
    opts.safety = cfg.safety;
    opts.gamma1 = cfg.gamma1;
    opts.gamma2 = cfg.gamma2;
    TrajectoryLog log;
    DiagnosticsReport rep;
    {
      py::gil_scoped_release release;
      log = run_scenario(sc);
      rep = run_diagnostics(log, sc, opts);
    }
    py::dict d = log_dict(log);
    d["V1"] = rep.V1;
    d["L"] = rep.lp.L;
    d["P"] = rep.lp.P;
    d["V"] = rep.V;
    d["minimal_C"] = rep.c_check.minimum;
    d["gamma1"] = rep.lemma1.gamma1;
    d["gamma2"] = rep.lemma1.gamma2;
    d["zeta_L"] = rep.zeta_L;
    py::dict checks;
    for (const auto& c : rep.checks) checks[py::str(c.name)] = py::make_tuple(c.pass, c.detail);
    d["checks"] = checks;
    return d;
  }, py::arg("config"), py::arg("T") = py::none());
}
