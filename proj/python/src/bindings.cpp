#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "jcnoise/errors.hpp"
#include "jcnoise/experiment.hpp"
#include "jcnoise/field_states.hpp"
#include "jcnoise/jc_dynamics.hpp"
#include "jcnoise/numerics.hpp"
#include "jcnoise/observables.hpp"

namespace py = pybind11;
using namespace jcnoise;

namespace {

DtsMethod parse_method(const std::string& name) {
    if (name == "unitary") return DtsMethod::unitary;
    if (name == "displaced_number") return DtsMethod::displaced_number;
    if (name == "pacs_mixture") return DtsMethod::pacs_mixture;
    throw py::value_error("method must be unitary, displaced_number or pacs_mixture");
}

Propagator parse_propagator(const std::string& name) {
    if (name == "analytic") return Propagator::analytic;
    if (name == "numeric") return Propagator::numeric;
    throw py::value_error("propagator must be analytic or numeric");
}

const char* status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
    }
    return "fail";
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Jaynes-Cummings dynamics of an atom driven by noisy coherent fields";
    m.attr("__version__") = library_version();

    auto base = py::register_exception<Error>(m, "JcnoiseError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
    py::register_exception<NotHermitian>(m, "NotHermitian", base.ptr());
    py::register_exception<NonFinite>(m, "NonFinite", base.ptr());
    py::register_exception<MethodDiverged>(m, "MethodDiverged", base.ptr());
    py::register_exception<ResonantOnly>(m, "ResonantOnly", base.ptr());
    py::register_exception<EmptyWindow>(m, "EmptyWindow", base.ptr());
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<CutoffTooSmall>(m, "CutoffTooSmall", base.ptr());

    // numerics
    m.def("laguerre", &laguerre, py::arg("m"), py::arg("k"), py::arg("x"),
          "Associated Laguerre polynomial L_m^(k)(x).");
    m.def("matrix_exponential", &matrix_exponential, py::arg("m"));
    m.def("hermitian_eigenvalues", &hermitian_eigenvalues, py::arg("m"), py::arg("tol") = 1e-10,
          "Ascending eigenvalues of a Hermitian matrix.");
    m.def("partial_transpose_atom", &partial_transpose_atom, py::arg("joint"), py::arg("field_dim"));

    // field states
    py::class_<FieldState>(m, "FieldState")
        .def_property_readonly("rho", [](const FieldState& s) { return s.rho; })
        .def_property_readonly("cutoff", &FieldState::cutoff)
        .def_property_readonly("kind", &FieldState::kind_name)
        .def_readonly("photons_added", &FieldState::photons_added)
        .def_readonly("tail_mass", &FieldState::tail_mass)
        .def_property_readonly("alpha", [](const FieldState& s) { return s.params.alpha; })
        .def_property_readonly("nbar", [](const FieldState& s) { return s.params.nbar; })
        .def_property_readonly("q", [](const FieldState& s) { return s.params.q; })
        .def("__repr__", [](const FieldState& s) {
            return "<FieldState " + s.kind_name() + " cutoff=" + std::to_string(s.cutoff()) + ">";
        });

    m.def("number_state", &number_state, py::arg("n"), py::arg("cutoff"));
    m.def("coherent_state", &coherent_state, py::arg("alpha"), py::arg("cutoff") = kDefaultCutoff);
    m.def("thermal_state", &thermal_state, py::arg("nbar"), py::arg("cutoff") = kDefaultCutoff);
    m.def("displacement_operator", &displacement_operator, py::arg("alpha"),
          py::arg("cutoff") = kDefaultCutoff);
    m.def(
        "displaced_thermal",
        [](Complex alpha, double nbar, std::size_t cutoff, const std::string& method) {
            return displaced_thermal(alpha, nbar, cutoff, parse_method(method));
        },
        py::arg("alpha"), py::arg("nbar"), py::arg("cutoff") = kDefaultCutoff,
        py::arg("method") = "unitary");
    m.def("mtcs", &mtcs, py::arg("alpha"), py::arg("nbar"), py::arg("q"),
          py::arg("cutoff") = kDefaultCutoff, "(1 - q) thermal + q |alpha><alpha|.");
    m.def("pacs", &pacs, py::arg("alpha"), py::arg("m"), py::arg("cutoff") = kDefaultCutoff);
    m.def("photon_add", &photon_add, py::arg("state"));
    m.def("truncate_field", &truncate_field, py::arg("state"), py::arg("dim"));
    m.def("equal_overlap_q", &equal_overlap_q, py::arg("alpha"), py::arg("nbar"));
    m.def("coherent_overlap", &coherent_overlap, py::arg("state"), py::arg("alpha"));
    m.def("purity_deficit", &purity_deficit, py::arg("state"));
    m.def("mean_photon_number", &mean_photon_number, py::arg("state"));
    m.def(
        "photon_distribution",
        [](const FieldState& s) {
            const auto p = photon_distribution(s);
            return py::array_t<double>(static_cast<py::ssize_t>(p.size()), p.data());
        },
        py::arg("state"));
    m.def("local_maxima", &local_maxima, py::arg("distribution"), py::arg("flat_tol") = 1e-15);

    // dynamics
    py::class_<JointState>(m, "JointState")
        .def_property_readonly("rho", [](const JointState& s) { return s.rho; })
        .def_readonly("field_dim", &JointState::field_dim);

    m.def("initial_joint_state", &initial_joint_state, py::arg("field"));
    m.def(
        "evolve_analytic",
        [](const FieldState& f, double t) { return evolve_analytic(f, t); },
        py::arg("field"), py::arg("lambda_t"));
    m.def(
        "evolve_numeric",
        [](const JointState& s, double t, double detuning) {
            JCParams p;
            p.detuning = detuning;
            return evolve_numeric(s, p, t);
        },
        py::arg("initial"), py::arg("lambda_t"), py::arg("detuning") = 0.0);
    m.def("reduced_field", &reduced_field, py::arg("state"));
    m.def("population_inversion", &population_inversion, py::arg("state"));
    m.def("negativity", &negativity, py::arg("state"), py::arg("clamp") = kNegativityClamp);

    m.def("uniform_grid", &uniform_grid, py::arg("t_max") = kDefaultTMax,
          py::arg("steps") = kDefaultSteps);
    m.def(
        "time_series",
        [](const FieldState& f, const std::vector<double>& grid, const std::string& propagator,
           unsigned threads) {
            TimeSeries s;
            {
                py::gil_scoped_release release;
                s = time_series(f, grid, parse_propagator(propagator), JCParams{}, threads);
            }
            const auto n = static_cast<py::ssize_t>(s.rows.size());
            py::array_t<double> t(n), w(n), neg(n);
            auto tv = t.mutable_unchecked<1>();
            auto wv = w.mutable_unchecked<1>();
            auto nv = neg.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < n; ++i) {
                const auto& row = s.rows[static_cast<std::size_t>(i)];
                tv(i) = row.lambda_t;
                wv(i) = row.inversion;
                nv(i) = row.negativity;
            }
            py::dict out;
            out["lambda_t"] = t;
            out["inversion"] = w;
            out["negativity"] = neg;
            return out;
        },
        py::arg("field"), py::arg("grid"), py::arg("propagator") = "analytic",
        py::arg("threads") = 0u,
        "Returns a dict of numpy arrays: lambda_t, inversion, negativity.");
    m.def(
        "revival_contrast",
        [](const std::vector<double>& grid, const std::vector<double>& inversion, double lo,
           double hi) { return revival_contrast(grid, inversion, lo, hi); },
        py::arg("grid"), py::arg("inversion"), py::arg("t_lo") = kRevivalWindowLo,
        py::arg("t_hi") = kRevivalWindowHi);

    // verification
    m.def(
        "verify",
        [](std::size_t cutoff, const std::string& perturb) {
            VerifyOptions options;
            options.cutoff = cutoff;
            options.perturb = perturb;
            VerificationReport report;
            {
                py::gil_scoped_release release;
                report = verify_suite(options);
            }
            py::list checks;
            for (const auto& c : report.checks) {
                py::dict d;
                d["criterion"] = c.criterion;
                d["name"] = c.name;
                d["status"] = status_name(c.status);
                d["measured"] = c.measured;
                d["bound"] = c.bound;
                d["note"] = c.note;
                checks.append(d);
            }
            return py::make_tuple(checks, render_report(report));
        },
        py::arg("cutoff") = kDefaultCutoff, py::arg("perturb") = "",
        "Runs the verification suite; returns (checks, rendered report).");
}
