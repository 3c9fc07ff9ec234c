#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homflow/error_analysis.hpp"
#include "homflow/errors.hpp"
#include "homflow/experiment.hpp"
#include "homflow/lie_butcher.hpp"

namespace py = pybind11;
using namespace homflow;

namespace {

CoefficientField field_from(const SpaceDescriptor& space, const std::string& family,
                            std::optional<Eigen::Vector3d> vector, std::optional<double> epsilon) {
  if (!vector && !epsilon) return sample_field(space, family);
  FieldParams p = default_field_params(family);
  if (vector) p.vector = *vector;
  if (epsilon) p.epsilon = *epsilon;
  return sample_field(space, family, p);
}

py::dict slope_dict(const SlopeReport& r) {
  py::dict d;
  d["slope"] = r.slope;
  d["intercept"] = r.intercept;
  d["residual"] = r.residual;
  d["window_h"] = r.window_h;
  d["lo"] = r.lo;
  d["hi"] = r.hi;
  d["pass"] = r.pass;
  return d;
}

py::dict table_dict(const ErrorTable& t) {
  std::vector<double> h, metric, testfn;
  for (const auto& r : t.rows) {
    h.push_back(r.h);
    metric.push_back(r.err_metric);
    testfn.push_back(r.err_testfn_max);
  }
  py::dict d;
  d["method"] = t.method;
  d["h"] = h;
  d["err_metric"] = metric;
  d["err_testfn_max"] = testfn;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lie group integrators on spheres and rotation groups";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<SpaceDescriptor>(m, "SpaceDescriptor")
      .def_static("sphere", &SpaceDescriptor::sphere, py::arg("n"))
      .def_static("group", &SpaceDescriptor::group, py::arg("n"))
      .def_static("parse", &SpaceDescriptor::parse, py::arg("id"))
      .def_property_readonly("id", &SpaceDescriptor::id)
      .def_property_readonly("n", &SpaceDescriptor::n)
      .def_property_readonly("ambient_dim", &SpaceDescriptor::ambient_dim)
      .def_property_readonly("tangent_dim", &SpaceDescriptor::tangent_dim)
      .def("base_point", &SpaceDescriptor::base_point)
      .def("__eq__", [](const SpaceDescriptor& a, const SpaceDescriptor& b) { return a == b; })
      .def("__repr__", [](const SpaceDescriptor& s) { return "SpaceDescriptor('" + s.id() + "')"; });

  py::class_<Point>(m, "Point")
      .def(py::init<SpaceDescriptor, Matrix>(), py::arg("space"), py::arg("coords"))
      .def_static("base", &Point::base)
      .def_property_readonly("space", &Point::space)
      .def_property_readonly("coords", &Point::coords);

  m.def("sample_point", &sample_point, py::arg("space"), py::arg("seed"));
  m.def("geodesic_distance", &geodesic_distance, py::arg("x"), py::arg("y"));
  m.def("act", &act, py::arg("g"), py::arg("x"));
  m.def("manifold_defect", &manifold_defect, py::arg("x"));

  m.def("mat_exp", &mat_exp, py::arg("a"));
  m.def("mat_log", &mat_log, py::arg("r"));
  m.def("dexpinv", &dexpinv, py::arg("u"), py::arg("v"), py::arg("q"));
  m.def("commutator", &commutator, py::arg("a"), py::arg("b"));
  m.def("hat", &hat, py::arg("w"));
  m.def("vee", &vee, py::arg("a"));
  m.def("bernoulli", &bernoulli, py::arg("k"));

  py::class_<CoefficientField>(m, "CoefficientField")
      .def_property_readonly("name", &CoefficientField::name)
      .def_property_readonly("space", &CoefficientField::space)
      .def_property_readonly("regularity", &CoefficientField::regularity)
      .def("coeff", &CoefficientField::coeff, py::arg("x"))
      .def("vector", &CoefficientField::vector, py::arg("x"));
  m.def("sample_field", &field_from, py::arg("space"), py::arg("family"), py::arg("vector") = py::none(),
        py::arg("epsilon") = py::none());
  m.def("constant_field", [](const SpaceDescriptor& s, const Matrix& xi) { return CoefficientField::constant(s, xi); },
        py::arg("space"), py::arg("xi"));

  m.def("method_ids", &MethodSpec::known_ids);
  m.def("method_order", [](const std::string& id) { return MethodSpec::from_id(id).order; }, py::arg("method"));
  m.def(
      "step",
      [](const std::string& id, const CoefficientField& v, const Point& x, double h) {
        return step(v, x, h, MethodSpec::from_id(id));
      },
      py::arg("method"), py::arg("field"), py::arg("x"), py::arg("h"));
  m.def(
      "integrate",
      [](const std::string& id, const CoefficientField& v, const Point& x0, const std::vector<double>& grid) {
        const auto tr = integrate(MethodSpec::from_id(id), v, x0, grid);
        std::vector<Matrix> pts;
        for (const auto& p : tr.points) pts.push_back(p.coords());
        return pts;
      },
      py::arg("method"), py::arg("field"), py::arg("x0"), py::arg("grid"));
  m.def("uniform_grid", &uniform_grid, py::arg("t0"), py::arg("t1"), py::arg("n"));
  m.def("reference_flow", &reference_flow, py::arg("field"), py::arg("x0"), py::arg("t"),
        py::arg("tol") = kReferenceTolerance, py::call_guard<py::gil_scoped_release>());

  m.def(
      "forests",
      [](int n) {
        std::vector<std::string> out;
        for (const auto& f : generate_forests(n)) out.push_back(f.to_string());
        return out;
      },
      py::arg("order"));
  m.def(
      "forest_factorial", [](const std::string& s) { return sigma_factorial_character(PlanarForest::parse(s)).factorial; },
      py::arg("forest"));

  m.def(
      "local_error_table",
      [](const std::string& id, const CoefficientField& v, const Point& x0, const std::vector<double>& hs) {
        LocalTableOptions opt;
        opt.comparison_epsilon = 0.0;
        ErrorTable t;
        {
          py::gil_scoped_release release;
          t = local_error_table(MethodSpec::from_id(id), v, x0, hs, test_function_suite(v.space()), opt);
        }
        return table_dict(t);
      },
      py::arg("method"), py::arg("field"), py::arg("x0"), py::arg("hs"));
  m.def(
      "global_error_table",
      [](const std::string& id, const CoefficientField& v, const Point& x0, double t_end, const std::vector<int>& ns) {
        ErrorTable t;
        {
          py::gil_scoped_release release;
          t = global_error_table(MethodSpec::from_id(id), v, x0, t_end, ns);
        }
        return table_dict(t);
      },
      py::arg("method"), py::arg("field"), py::arg("x0"), py::arg("t_end"), py::arg("ns"));
  m.def(
      "convergence_slope",
      [](const std::vector<double>& h, const std::vector<double>& err, double lo, double hi) {
        return slope_dict(convergence_slope(h, err, lo, hi));
      },
      py::arg("h"), py::arg("err"), py::arg("lo"), py::arg("hi"));

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto config = ExperimentConfig::parse(config_text);
        VerdictReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(config);
        }
        py::dict tables;
        for (const auto& t : rep.tables) tables[py::str(t.name)] = to_csv(t);
        py::dict d;
        d["pass"] = rep.pass();
        d["json"] = to_json(rep);
        d["tables"] = tables;
        return d;
      },
      py::arg("config_text"), "Runs a config given as text; returns pass flag, JSON report and CSV tables.");
}
