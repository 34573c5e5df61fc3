// Python bindings: expressions, surface charts, barotropic pressures, the
// bubble model and config-driven scenarios.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bsflow/bubble.hpp"
#include "bsflow/campaign.hpp"

namespace py = pybind11;
using namespace bsflow;

namespace {

Var var_of(const std::string& name) {
  if (name == "x1") return Var::X1;
  if (name == "x2") return Var::X2;
  if (name == "x3") return Var::X3;
  if (name == "t") return Var::T;
  throw py::value_error("variable must be x1, x2, x3 or t, got '" + name + "'");
}

Expr as_expr(const py::object& o) {
  if (py::isinstance<Expr>(o)) return o.cast<Expr>();
  if (py::isinstance<py::str>(o)) return expr::parse(o.cast<std::string>());
  return Expr(o.cast<double>());
}

py::dict trajectory_dict(const Trajectory& tr) {
  const std::size_t n = tr.records.size();
  std::vector<double> t(n), R(n), U(n), rA(n), rS(n), kin(n), diss(n), work(n), gap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BubbleRecord& r = tr.records[i];
    t[i] = r.t;
    R[i] = r.s.R;
    U[i] = r.s.U;
    rA[i] = r.s.rho_A;
    rS[i] = r.s.rho_S;
    kin[i] = r.kinetic;
    diss[i] = r.dissipated;
    work[i] = r.work;
    gap[i] = r.gap;
  }
  py::dict d;
  d["t"] = t;
  d["R"] = R;
  d["U"] = U;
  d["rho_A"] = rA;
  d["rho_S"] = rS;
  d["kinetic"] = kin;
  d["dissipated"] = diss;
  d["work"] = work;
  d["gap"] = gap;
  d["halted"] = tr.halted;
  d["diagnostic"] = tr.diagnostic;
  return d;
}

py::dict result_dict(const ScenarioResult& r) {
  py::list rows;
  for (const CheckRow& c : r.rows) {
    py::dict row;
    row["check"] = c.check;
    row["case"] = c.label;
    row["gap"] = c.gap;
    row["tol"] = c.tol;
    row["pass"] = c.pass;
    rows.append(row);
  }
  py::dict files;
  for (const auto& [name, content] : r.files) files[py::str(name)] = content;
  py::dict d;
  d["scenario"] = r.scenario;
  d["kind"] = to_string(r.kind);
  d["passed"] = r.passed();
  d["error"] = r.error;
  d["rows"] = rows;
  d["files"] = files;
  d["log"] = r.log;
  return d;
}

py::dict run(const Scenario& s) {
  ScenarioResult r;
  {
    py::gil_scoped_release release;
    r = run_scenario(s);
  }
  return result_dict(r);
}

}  // namespace

PYBIND11_MODULE(_bsflow, m) {
  m.doc() = "Surface-flow verification toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<expr::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BubbleError>(m, "BubbleError", PyExc_RuntimeError);

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& src) { return expr::parse(src); }), py::arg("source"))
      .def("__call__",
           [](const Expr& e, double x1, double x2, double x3, double t) { return expr::eval(e, {x1, x2, x3, t}); },
           py::arg("x1") = 0.0, py::arg("x2") = 0.0, py::arg("x3") = 0.0, py::arg("t") = 0.0)
      .def("derivative", [](const Expr& e, const std::string& v) { return expr::derivative(e, var_of(v)); })
      .def("__str__", [](const Expr& e) { return expr::to_string(e); })
      .def("__repr__", [](const Expr& e) { return "Expr('" + expr::to_string(e) + "')"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return expr::equal(a, b); });

  py::class_<SurfaceChart>(m, "Surface")
      .def_static("sphere", [](const py::object& R) { return SurfaceChart::sphere(as_expr(R)); }, py::arg("radius"))
      .def_static("ellipsoid",
                  [](double a, double b, double c, const py::object& s) { return SurfaceChart::ellipsoid(a, b, c, as_expr(s)); },
                  py::arg("a"), py::arg("b"), py::arg("c"), py::arg("scale") = 1.0)
      .def_static("perturbed_sphere",
                  [](const py::object& R, double eps) { return SurfaceChart::perturbed_sphere(as_expr(R), eps); },
                  py::arg("radius"), py::arg("eps"))
      .def("point", &SurfaceChart::point, py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
      .def("normal", &SurfaceChart::normal, py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
      .def("projection", &SurfaceChart::projection, py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
      .def("mean_curvature", &SurfaceChart::mean_curvature, py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
      .def("normal_speed", &SurfaceChart::normal_speed, py::arg("u"), py::arg("v"), py::arg("t") = 0.0)
      .def("area", [](const SurfaceChart& c, int N, double t) { return integrate_surface(c, {N}, t, Expr(1.0)); },
           py::arg("N") = 24, py::arg("t") = 0.0)
      .def("__repr__", &SurfaceChart::describe);

  m.def("barotropic_pressure",
        [](const std::string& law, double rho) {
          return constitutive::barotropic_pressure(BarotropicLaw::parse(law), rho);
        },
        py::arg("law"), py::arg("rho"), "rho p'(rho) - p(rho) for a law written in rho.");

  py::class_<BubbleModel>(m, "BubbleModel")
      .def(py::init([](const std::string& p_A, const std::string& p_S, double mu_A, double lambda_A, double mu_S,
                       double lambda_S, double pi_inf) {
             BubbleParams p;
             p.p_A = BarotropicLaw::parse(p_A);
             p.p_S = BarotropicLaw::parse(p_S);
             p.mu_A = mu_A;
             p.lambda_A = lambda_A;
             p.mu_S = mu_S;
             p.lambda_S = lambda_S;
             p.pi_inf = pi_inf;
             return BubbleModel(p);
           }),
           py::arg("p_A"), py::arg("p_S"), py::arg("mu_A") = 0.0, py::arg("lambda_A") = 0.0, py::arg("mu_S") = 0.0,
           py::arg("lambda_S") = 0.0, py::arg("pi_inf") = 1.0)
      .def("rhs",
           [](const BubbleModel& b, double R, double U, double rA, double rS) {
             const BubbleState d = b.rhs({R, U, rA, rS});
             return py::make_tuple(d.R, d.U, d.rho_A, d.rho_S);
           },
           py::arg("R"), py::arg("U"), py::arg("rho_A"), py::arg("rho_S"))
      .def("balancing_density", &BubbleModel::balancing_density, py::arg("R"), py::arg("rho_S"))
      .def("equilibrium_radius", &BubbleModel::equilibrium_radius, py::arg("mA"), py::arg("mS"), py::arg("lo"),
           py::arg("hi"))
      .def("natural_period",
           [](const BubbleModel& b, double R, double rA, double rS) { return b.natural_period({R, 0.0, rA, rS}); },
           py::arg("R"), py::arg("rho_A"), py::arg("rho_S"))
      .def("integrate",
           [](const BubbleModel& b, double R, double U, double rA, double rS, double t_end, double dt) {
             Trajectory tr;
             {
               py::gil_scoped_release release;
               tr = integrate(b, {R, U, rA, rS}, t_end, dt);
             }
             return trajectory_dict(tr);
           },
           py::arg("R"), py::arg("U"), py::arg("rho_A"), py::arg("rho_S"), py::arg("t_end"), py::arg("dt"),
           "RK4 trajectory as a dict of lists plus 'halted' and 'diagnostic'.");

  m.def("run_config",
        [](const std::string& text, const std::vector<std::string>& overrides, double tol_scale) {
          Scenario s = Scenario::parse(text);
          for (const std::string& o : overrides) s.apply_override(o);
          s.tol_scale = tol_scale;
          return run(s);
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{}, py::arg("tol_scale") = 1.0,
        "Parses INI text, runs the scenario and returns its checks and report files.");
  m.def("run_config_file",
        [](const std::string& path, const std::vector<std::string>& overrides, double tol_scale) {
          Scenario s = Scenario::load(path);
          for (const std::string& o : overrides) s.apply_override(o);
          s.tol_scale = tol_scale;
          return run(s);
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{}, py::arg("tol_scale") = 1.0);
}
