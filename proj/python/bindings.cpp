#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdde/certificate.hpp"
#include "cdde/error.hpp"
#include "cdde/simulator.hpp"
#include "cdde/stability.hpp"
#include "problem_io.hpp"

namespace py = pybind11;
using namespace cdde;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vector to_vector(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
    return Vector(std::vector<double>(a.data(), a.data() + a.size()));
}

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

std::optional<Vector> to_optional(const std::optional<Array>& a) {
    if (!a) return std::nullopt;
    return to_vector(*a);
}

py::array_t<double> from_vector(const Vector& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> from_matrix(const Matrix& M) {
    py::array_t<double> out({static_cast<py::ssize_t>(M.rows()), static_cast<py::ssize_t>(M.cols())});
    std::copy(M.values().begin(), M.values().end(), out.mutable_data());
    return out;
}

py::array_t<double> stack(const std::vector<Vector>& rows) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().size();
    py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(dim)});
    double* p = out.mutable_data();
    for (const Vector& r : rows) p = std::copy(r.begin(), r.end(), p);
    return out;
}

py::dict convergence_dict(const ConvergenceResult& r) {
    py::dict d;
    d["T"] = r.T;
    d["per_component_T"] = from_vector(r.per_component_T);
    d["per_component_alpha"] = from_vector(r.per_component_alpha);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Certified componentwise bounds for positive coupled differential-difference systems";

    py::register_exception<Error>(m, "CddeError", PyExc_RuntimeError);

    py::class_<SystemSpec>(m, "SystemSpec")
        .def(py::init([](const Array& A, const Array& B, const Array& C, const Array& D, double h_max,
                         const Array& omega_bar, const Array& d_bar, const Array& psi_bar,
                         const Array& phi_bar) {
                 SystemSpec s;
                 s.A = to_matrix(A);
                 s.B = to_matrix(B);
                 s.C = to_matrix(C);
                 s.D = to_matrix(D);
                 s.h_max = h_max;
                 s.omega_bar = to_vector(omega_bar);
                 s.d_bar = to_vector(d_bar);
                 s.psi_bar = to_vector(psi_bar);
                 s.phi_bar = to_vector(phi_bar);
                 return clamp_roundoff(s);
             }),
             py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("h_max"),
             py::arg("omega_bar"), py::arg("d_bar"), py::arg("psi_bar"), py::arg("phi_bar"))
        .def_property_readonly("A", [](const SystemSpec& s) { return from_matrix(s.A); })
        .def_property_readonly("B", [](const SystemSpec& s) { return from_matrix(s.B); })
        .def_property_readonly("C", [](const SystemSpec& s) { return from_matrix(s.C); })
        .def_property_readonly("D", [](const SystemSpec& s) { return from_matrix(s.D); })
        .def_readonly("h_max", &SystemSpec::h_max)
        .def_property_readonly("omega_bar", [](const SystemSpec& s) { return from_vector(s.omega_bar); })
        .def_property_readonly("d_bar", [](const SystemSpec& s) { return from_vector(s.d_bar); })
        .def_property_readonly("psi_bar", [](const SystemSpec& s) { return from_vector(s.psi_bar); })
        .def_property_readonly("phi_bar", [](const SystemSpec& s) { return from_vector(s.phi_bar); })
        .def_property_readonly("n", &SystemSpec::n)
        .def_property_readonly("m", &SystemSpec::m);

    m.def("demo_system", &demo_system, "The three-state, two-output benchmark system.");
    m.def("validate_structure", [](const SystemSpec& s) { return validate_structure(s).findings; },
          "Structural findings; an empty list means valid.");

    m.def("is_metzler_hurwitz", [](const Array& A) { return is_metzler_hurwitz(to_matrix(A)); });
    m.def("is_schur_nonneg", [](const Array& D) { return is_schur_nonneg(to_matrix(D)); });
    m.def(
        "check_joint_condition",
        [](const SystemSpec& s, const std::optional<Array>& xi) {
            const StabilityReport r = check_joint_condition(s, to_optional(xi));
            py::dict d;
            d["a_is_metzler"] = r.a_is_metzler;
            d["bcd_nonnegative"] = r.bcd_nonnegative;
            d["d_is_schur"] = r.d_is_schur;
            d["joint_condition_holds"] = r.joint_condition_holds;
            d["witness_p"] = r.witness_p ? py::object(from_vector(*r.witness_p)) : py::none();
            d["witness_q"] = r.witness_q ? py::object(from_vector(*r.witness_q)) : py::none();
            d["diagnostics"] = r.diagnostics;
            return d;
        },
        py::arg("spec"), py::arg("xi") = py::none());
    m.def("alpha_max", [](const Array& A, double step) { return alpha_max(to_matrix(A), step); },
          py::arg("A"), py::arg("step") = kDefaultAlphaStep);

    m.def("gamma_component",
          [](const Array& A, double alpha, const Array& theta, std::size_t i) {
              return gamma_component(to_matrix(A), alpha, to_vector(theta), i);
          },
          py::arg("A"), py::arg("alpha"), py::arg("theta_bar"), py::arg("i"));
    m.def("time_to_threshold", &time_to_threshold, py::arg("gamma"), py::arg("delta"), py::arg("alpha"));
    m.def("finite_time",
          [](const Array& A, const Array& theta, const Array& delta, double step) {
              return convergence_dict(finite_time(to_matrix(A), to_vector(theta), to_vector(delta), step));
          },
          py::arg("A"), py::arg("theta_bar"), py::arg("delta"), py::arg("alpha_step") = kDefaultAlphaStep);

    m.def("ultimate_bound", [](const SystemSpec& s) {
        const UltimateBound ub = ultimate_bound(s);
        return py::make_tuple(from_vector(ub.eta), from_vector(ub.varsigma));
    });

    py::class_<BoundCertificate>(m, "BoundCertificate")
        .def_property_readonly("eta", [](const BoundCertificate& c) { return from_vector(c.eta); })
        .def_property_readonly("varsigma", [](const BoundCertificate& c) { return from_vector(c.varsigma); })
        .def_property_readonly("p", [](const BoundCertificate& c) { return from_vector(c.p); })
        .def_property_readonly("q", [](const BoundCertificate& c) { return from_vector(c.q); })
        .def_readonly("mu", &BoundCertificate::mu)
        .def_readonly("mu_raw", &BoundCertificate::mu_raw)
        .def_readonly("T_star", &BoundCertificate::T_star)
        .def_readonly("constant_bound", &BoundCertificate::constant_bound)
        .def_readonly("alpha_step", &BoundCertificate::alpha_step)
        .def_property_readonly("T", [](const BoundCertificate& c) { return c.convergence.T; })
        .def_property_readonly("convergence",
                               [](const BoundCertificate& c) { return convergence_dict(c.convergence); })
        .def("staircase",
             [](const BoundCertificate& c, double t) {
                 const StateBound b = staircase(c, t);
                 return py::make_tuple(from_vector(b.x), from_vector(b.y));
             })
        .def("to_json", &io::certificate_to_json);

    m.def("compute_certificate",
          [](const SystemSpec& s, double alpha_step, const std::optional<Array>& xi) {
              CertificateOptions o;
              o.alpha_step = alpha_step;
              o.xi = to_optional(xi);
              return compute_certificate(s, o);
          },
          py::arg("spec"), py::arg("alpha_step") = kDefaultAlphaStep, py::arg("xi") = py::none());
    m.def("staircase", [](const BoundCertificate& c, double t) {
        const StateBound b = staircase(c, t);
        return py::make_tuple(from_vector(b.x), from_vector(b.y));
    });

    py::class_<SimulationScenario>(m, "SimulationScenario")
        .def_readwrite("t_end", &SimulationScenario::t_end)
        .def_readwrite("step", &SimulationScenario::step)
        .def_property(
            "psi", [](const SimulationScenario& s) { return from_vector(s.psi); },
            [](SimulationScenario& s, const Array& v) { s.psi = to_vector(v); })
        .def_property_readonly("spec", [](const SimulationScenario& s) { return s.spec; })
        .def("scaled",
             [](const SimulationScenario& s, double a, double b) {
                 SimulationScenario out = s;
                 out.omega = s.omega.scaled(a);
                 out.d = s.d.scaled(b);
                 return out;
             },
             py::arg("a"), py::arg("b"), "Copy with the disturbances scaled by a and b.")
        .def("set_constant_phi", [](SimulationScenario& s, const Array& v) {
            s.phi = SignalSpec::constant(to_vector(v));
        });

    m.def("demo_scenario", &demo_scenario, py::arg("a") = 1.0, py::arg("b") = 1.0,
          py::arg("t_end") = 40.0, py::arg("step") = 1e-3);
    m.def("extreme_scenario", &extreme_scenario, py::arg("spec"), py::arg("a") = 1.0,
          py::arg("b") = 1.0, py::arg("t_end") = 40.0, py::arg("step") = 1e-3);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("step", &Trajectory::step)
        .def_property_readonly("t", [](const Trajectory& tr) {
            py::array_t<double> out(static_cast<py::ssize_t>(tr.times.size()));
            std::copy(tr.times.begin(), tr.times.end(), out.mutable_data());
            return out;
        })
        .def_property_readonly("x", [](const Trajectory& tr) { return stack(tr.x); })
        .def_property_readonly("y", [](const Trajectory& tr) { return stack(tr.y); })
        .def("__len__", &Trajectory::size);

    m.def("simulate", [](const SimulationScenario& sc) {
        py::gil_scoped_release release;
        return simulate(sc);
    });
    m.def("verify_domination",
          [](const Trajectory& tr, const BoundCertificate& c, double slack) {
              const DominationReport r = verify_domination(tr, c, slack);
              py::dict d;
              d["violated"] = r.violated();
              d["first_violation"] = r.first_violation ? py::object(py::float_(*r.first_violation)) : py::none();
              d["x_margin"] = from_vector(r.x_margin);
              d["y_margin"] = from_vector(r.y_margin);
              return d;
          },
          py::arg("trajectory"), py::arg("certificate"), py::arg("slack") = kDominationSlack);

    py::class_<io::Problem>(m, "Problem")
        .def_readonly("spec", &io::Problem::spec)
        .def_property_readonly("alpha_step", [](const io::Problem& p) { return p.options.alpha_step; })
        .def_property_readonly("step", [](const io::Problem& p) { return p.options.step; })
        .def_property_readonly("t_end", [](const io::Problem& p) { return p.options.t_end; })
        .def_property_readonly("xi", [](const io::Problem& p) {
            return p.options.xi ? py::object(from_vector(*p.options.xi)) : py::none();
        })
        .def("scenario", &io::Problem::scenario_or_extreme,
             "The file's scenario, or the worst-case constant one, on the file's grid.");
    m.def("load_problem", &io::load_problem, py::arg("path"));
    m.def("parse_problem", &io::parse_problem, py::arg("text"));
}
