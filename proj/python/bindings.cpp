#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kahler/errors.hpp"
#include "kahler/geometry.hpp"
#include "kahler/harness.hpp"

namespace py = pybind11;
using namespace kahler;

namespace {

template <std::size_t R>
py::array_t<double> to_numpy(const Tensor<R>& t) {
    std::vector<py::ssize_t> shape(R, t.extent());
    py::array_t<double> out(shape);
    std::copy(t.data().begin(), t.data().end(), out.mutable_data());
    return out;
}

py::dict coefficient_dict(const CoefficientSet& cs) {
    py::dict d;
    d["t"] = cs.t;
    d["A"] = cs.A;
    d["c"] = cs.c;
    d["lambda"] = cs.lambda;
    d["lambda_prime"] = cs.lambda_prime;
    d["mu"] = cs.mu;
    d["a1"] = cs.a1;
    d["a2"] = cs.a2;
    d["b1"] = cs.b1;
    d["b2"] = cs.b2;
    d["c1"] = cs.c1;
    d["c2"] = cs.c2;
    d["d1"] = cs.d1;
    d["d2"] = cs.d2;
    return d;
}

Perturbation perturbation(double b1_shift, double mu_shift, double d2_shift) {
    Perturbation p;
    p.b1_shift = b1_shift;
    p.mu_shift = mu_shift;
    p.d2_shift = d2_shift;
    return p;
}

VerificationConfig config_from(const std::string& text, const py::dict& overrides) {
    VerificationConfig cfg = parse_config(text);
    for (auto item : overrides) {
        const std::string key = py::str(item.first);
        const std::string value = py::str(item.second);
        apply_setting(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

CotangentPoint point(const Vec& x, const Vec& p) {
    if (x.size() != p.size()) throw RejectedInput("x and p must have the same length");
    return {x, p};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Natural diagonal Kahler-Einstein structures on cotangent bundles of space forms";

    py::register_exception<RejectedInput>(m, "RejectedInput", PyExc_ValueError);
    py::register_exception<SingularParameterError>(m, "SingularParameterError", PyExc_ArithmeticError);
    py::register_exception<InadmissiblePointError>(m, "InadmissiblePointError", PyExc_ValueError);
    py::register_exception<DiagnosticError>(m, "DiagnosticError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<SpaceFormChart>(m, "Chart")
        .def(py::init<int, double>(), py::arg("n"), py::arg("c"))
        .def_property_readonly("n", &SpaceFormChart::n)
        .def_property_readonly("c", &SpaceFormChart::c)
        .def("contains", &SpaceFormChart::contains)
        .def("sampling_radius", &SpaceFormChart::sampling_radius)
        .def("metric", [](const SpaceFormChart& chart, const Vec& x) {
            const MetricSample ms = metric_at(chart, x);
            py::dict d;
            d["g"] = ms.g;
            d["g_inv"] = ms.g_inv;
            d["gamma"] = to_numpy(ms.gamma);
            d["riemann"] = to_numpy(ms.riemann);
            return d;
        })
        .def("christoffel_oracle",
             [](const SpaceFormChart& chart, const Vec& x, std::optional<double> h) {
                 return to_numpy(fd_christoffel_oracle(chart, x, h));
             },
             py::arg("x"), py::arg("h") = py::none())
        .def("sectional_curvature", [](const SpaceFormChart& chart, const Vec& x, const Vec& u, const Vec& v) {
            return sectional_curvature(chart, x, u, v);
        });

    py::class_<LambdaFamily>(m, "Family")
        .def_static("constant", &LambdaFamily::constant, py::arg("A"), py::arg("B"))
        .def_static("power_plus_constant", &LambdaFamily::power_plus_constant, py::arg("A"), py::arg("m"), py::arg("B"))
        .def_static("inverse_sqrt", &LambdaFamily::inverse_sqrt, py::arg("A"), py::arg("c"), py::arg("B"))
        .def_static("custom",
                    [](double A, const std::string& name, std::function<std::pair<double, double>(double)> fn) {
                        return LambdaFamily::custom(A, name, [fn](double t) {
                            py::gil_scoped_acquire gil;
                            const auto [v, d] = fn(t);
                            return LambdaValue{v, d};
                        });
                    },
                    py::arg("A"), py::arg("name"), py::arg("fn"))
        .def_property_readonly("A", &LambdaFamily::A)
        .def("__call__", [](const LambdaFamily& f, double t) {
            const LambdaValue v = f(t);
            return std::make_pair(v.value, v.first);
        })
        .def("second_derivative", &LambdaFamily::second_derivative)
        .def("__repr__", &LambdaFamily::describe);

    m.def("coefficients",
          [](const LambdaFamily& f, double c, double t, double b1_shift, double mu_shift, double d2_shift) {
              return coefficient_dict(coefficients(f, c, t, perturbation(b1_shift, mu_shift, d2_shift)));
          },
          py::arg("family"), py::arg("c"), py::arg("t"), py::arg("b1_shift") = 0.0, py::arg("mu_shift") = 0.0,
          py::arg("d2_shift") = 0.0);

    m.def("check_admissibility",
          [](const LambdaFamily& f, double c, double t_max, int samples) {
              const AdmissibilityReport r = check_admissibility(f, c, t_max, samples);
              py::list conds;
              for (const auto& cond : r.conditions) {
                  py::dict d;
                  d["name"] = cond.name;
                  d["passed"] = cond.passed;
                  d["first_failure_t"] = cond.first_failure_t;
                  d["worst_value"] = cond.worst_value;
                  conds.append(d);
              }
              py::dict out;
              out["passed"] = r.all_passed();
              out["conditions"] = conds;
              return out;
          },
          py::arg("family"), py::arg("c"), py::arg("t_max"), py::arg("samples") = 1001);

    py::class_<GeometryConfig>(m, "Geometry")
        .def(py::init([](const SpaceFormChart& chart, const LambdaFamily& family, double b1_shift, double mu_shift,
                         double d2_shift) {
                 return GeometryConfig{chart, family, perturbation(b1_shift, mu_shift, d2_shift)};
             }),
             py::arg("chart"), py::arg("family"), py::arg("b1_shift") = 0.0, py::arg("mu_shift") = 0.0,
             py::arg("d2_shift") = 0.0)
        .def_property_readonly("n", &GeometryConfig::n)
        .def_property_readonly("c", &GeometryConfig::c)
        .def_property_readonly("einstein_constant", [](const GeometryConfig& g) { return g.c() * g.n() / g.A(); })
        .def("structure",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) {
                 const PointState s = evaluate_point(g, point(x, p));
                 const FullMatrices fm = full_matrices(s.st);
                 py::dict d;
                 d["t"] = s.coeffs.t;
                 d["J"] = fm.J;
                 d["G"] = fm.G;
                 d["phi"] = fundamental_form(s.st);
                 d["coefficients"] = coefficient_dict(s.coeffs);
                 return d;
             })
        .def("nijenhuis",
             [](const GeometryConfig& g, const Vec& x, const Vec& p, bool oracle) {
                 return oracle ? nijenhuis_oracle(g, point(x, p)).max_abs() : nijenhuis_closed_form(g, point(x, p)).max_abs();
             },
             py::arg("x"), py::arg("p"), py::arg("oracle") = false)
        .def("dphi_residual", [](const GeometryConfig& g, const Vec& x, const Vec& p) { return dphi_residual(g, point(x, p)); })
        .def("torsion_residual",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) { return torsion_residual(g, point(x, p)); })
        .def("connection", [](const GeometryConfig& g, const Vec& x,
                              const Vec& p) { return to_numpy(frame_connection(connection_coeffs(g, point(x, p)))); })
        .def("koszul_oracle",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) { return to_numpy(koszul_oracle(g, point(x, p))); })
        .def("curvature", [](const GeometryConfig& g, const Vec& x,
                             const Vec& p) { return to_numpy(assemble_curvature(curvature_blocks(g, point(x, p)))); })
        .def("curvature_oracle",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) { return to_numpy(curvature_oracle(g, point(x, p))); })
        .def("ricci",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) {
                 const PointState s = evaluate_point(g, point(x, p));
                 return ricci_blocks(curvature_blocks(s), s.st).full;
             })
        .def("nabla_K_residual",
             [](const GeometryConfig& g, const Vec& x, const Vec& p) { return nabla_K_residual(g, point(x, p)); })
        .def("holomorphic_sectional_curvature", [](const GeometryConfig& g, const Vec& x, const Vec& p, const Vec& X) {
            return holomorphic_sectional_curvature(g, point(x, p), X);
        });

    m.def("run_suite",
          [](const std::string& config_text, const py::dict& overrides, const std::string& format) {
              const VerificationConfig cfg = config_from(config_text, overrides);
              const ReportFormat fmt = parse_format(format);
              CheckReport report;
              {
                  py::gil_scoped_release release;
                  report = run_suite(cfg);
              }
              return emit_report(report, fmt);
          },
          py::arg("config_text"), py::arg("overrides") = py::dict(), py::arg("format") = "json");

    m.def("scan_hsc",
          [](const std::string& config_text, int directions, const py::dict& overrides) {
              const VerificationConfig cfg = config_from(config_text, overrides);
              return emit_scan_csv(scan_hsc(cfg, directions));
          },
          py::arg("config_text"), py::arg("directions"), py::arg("overrides") = py::dict());

    m.def("suite_checks", [] {
        std::vector<std::string> names;
        for (const CheckInfo& ci : suite_checks()) names.push_back(ci.name);
        return names;
    });
}
