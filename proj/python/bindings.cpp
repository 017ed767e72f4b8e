#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/errors.hpp"
#include "gvmbayes/inference.hpp"
#include "gvmbayes/special_functions.hpp"
#include "gvmbayes/study_harness.hpp"

namespace py = pybind11;
using namespace gvm;

namespace {

py::array_t<double> to_array(std::vector<double> v) {
    auto* heap = new std::vector<double>(std::move(v));
    py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
    return py::array_t<double>(heap->size(), heap->data(), owner);
}

Sample to_sample(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return Sample(std::vector<double>(a.data(), a.data() + a.size()));
}

PriorSpec make_prior(TestKind kind, double tau, double nu, double nu2, double xi, double lo, double hi) {
    switch (kind) {
        case TestKind::no_shift: return {VM2Params(nu, tau)};
        case TestKind::axial_symmetry: return {MixtureVM2Prior::symmetric(nu, nu2, tau, xi)};
        case TestKind::vm_symmetry: return {UniformPrior(lo, hi)};
    }
    throw InvalidArgument("unknown test kind");
}

py::dict bf_dict(const BayesFactorResult& r) {
    py::dict d;
    d["kind"] = std::string(to_string(r.kind));
    d["b01"] = r.b01;
    d["log_b01"] = r.log_b01;
    d["mc_std_error"] = r.mc_std_error;
    d["s_used"] = r.s_used;
    d["complement_draws"] = r.complement_draws;
    d["evidence"] = std::string(to_string(r.evidence));
    d["prior_atom_masses"] = r.prior_atom_masses;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GvM Bayesian tests (compiled core)";

    auto base = py::register_exception<Error>(m, "GvmError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<OverflowRisk>(m, "OverflowRisk", base.ptr());
    py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
    py::register_exception<DegenerateEstimate>(m, "DegenerateEstimate", base.ptr());
    py::register_exception<PriorMismatch>(m, "PriorMismatch", base.ptr());
    py::register_exception<IterationCap>(m, "IterationCap", base.ptr());
    py::register_exception<UnknownCase>(m, "UnknownCase", PyExc_KeyError);

    m.def("bessel_i", &bessel_i, py::arg("nu"), py::arg("z"));
    m.def("log_bessel_i0", &log_bessel_i0, py::arg("z"));
    m.def("gvm_norm_const", &gvm_norm_const, py::arg("delta"), py::arg("kappa1"), py::arg("kappa2"));
    m.def("log_gvm_norm_const", &log_gvm_norm_const, py::arg("delta"), py::arg("kappa1"), py::arg("kappa2"));

    py::class_<GvMParams>(m, "GvMParams")
        .def(py::init<double, double, double, double>(), py::arg("mu1"), py::arg("mu2"), py::arg("kappa1"),
             py::arg("kappa2"))
        .def_property_readonly("mu1", &GvMParams::mu1)
        .def_property_readonly("mu2", &GvMParams::mu2)
        .def_property_readonly("kappa1", &GvMParams::kappa1)
        .def_property_readonly("kappa2", &GvMParams::kappa2)
        .def_property_readonly("delta", &GvMParams::delta)
        .def("__repr__", [](const GvMParams& p) {
            return "GvMParams(" + std::to_string(p.mu1()) + ", " + std::to_string(p.mu2()) + ", " +
                   std::to_string(p.kappa1()) + ", " + std::to_string(p.kappa2()) + ")";
        });

    m.def(
        "gvm_density",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> theta, const GvMParams& p) {
            std::vector<double> out(theta.size());
            for (py::ssize_t i = 0; i < theta.size(); ++i) out[i] = std::exp(gvm_log_density(theta.data()[i], p));
            return to_array(std::move(out));
        },
        py::arg("theta"), py::arg("params"));

    m.def(
        "sample_gvm",
        [](const GvMParams& p, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            return to_array(sample_gvm_n(p, n, rng));
        },
        py::arg("params"), py::arg("n"), py::arg("seed"));

    m.def(
        "fit_mle",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> angles, int max_iterations) {
            FitOptions opt;
            opt.max_iterations = max_iterations;
            const auto fit = fit_mle(to_sample(angles), opt);
            py::dict d;
            d["params"] = fit.params;
            d["log_likelihood"] = fit.log_likelihood;
            d["converged"] = fit.converged;
            d["iterations"] = fit.iterations;
            d["gradient_norm"] = fit.gradient_norm;
            return d;
        },
        py::arg("angles"), py::arg("max_iterations") = 10'000);

    m.def(
        "prior_atom_masses",
        [](const std::string& kind, double epsilon, double tau, double nu, double nu2, double xi, double lo,
           double hi) {
            const auto k = parse_test_kind(kind);
            const auto pp = compute_p0(make_prior(k, tau, nu, nu2, xi, lo, hi), PerturbationConfig(epsilon, k));
            std::vector<double> masses;
            for (const auto& a : pp.atoms) masses.push_back(a.mass);
            return masses;
        },
        py::arg("kind"), py::arg("epsilon"), py::arg("tau") = 300.0, py::arg("nu") = 0.0, py::arg("nu2") = kHalfPi,
        py::arg("xi") = 0.5, py::arg("kappa2_min") = 0.0, py::arg("kappa2_max") = 0.5);

    m.def(
        "bayes_factor",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> angles, const std::string& kind,
           double mu1, double kappa1, double kappa2, double mu2, double epsilon, std::size_t s, std::uint64_t seed,
           double tau, double nu, double nu2, double xi, double lo, double hi) {
            const auto k = parse_test_kind(kind);
            const auto nuis = k == TestKind::vm_symmetry ? FixedNuisance::for_vm_test(mu1, mu2, kappa1)
                                                         : FixedNuisance::for_shift_tests(mu1, kappa1, kappa2);
            Rng rng(seed);
            return bf_dict(bayes_factor(to_sample(angles), make_prior(k, tau, nu, nu2, xi, lo, hi),
                                        PerturbationConfig(epsilon, k), nuis, s, rng));
        },
        py::arg("angles"), py::arg("kind"), py::arg("mu1"), py::arg("kappa1"), py::arg("kappa2") = 1.0,
        py::arg("mu2") = 0.0, py::arg("epsilon") = 0.18, py::arg("s") = 100'000, py::arg("seed") = 1,
        py::arg("tau") = 300.0, py::arg("nu") = 0.0, py::arg("nu2") = kHalfPi, py::arg("xi") = 0.5,
        py::arg("kappa2_min") = 0.0, py::arg("kappa2_max") = 0.5);

    m.def(
        "interpret_bf", [](double b01) { return std::string(to_string(interpret_bf(b01))); }, py::arg("b01"));

    m.def(
        "run_case",
        [](const std::string& name, std::size_t r, std::size_t s, std::size_t sequences, unsigned threads) {
            auto spec = builtin_case(name);
            if (r) spec.r = r;
            if (s) spec.s = s;
            if (sequences) spec.sequences = sequences;
            StudyReport rep;
            {
                py::gil_scoped_release release;
                rep = run_case(spec, RunOptions{threads, nullptr});
            }
            py::dict d;
            d["case"] = std::string(to_string(rep.name));
            d["replicates"] = rep.replicates;
            d["per_sequence_means"] = rep.per_sequence_means;
            d["mean"] = rep.mean;
            d["ci"] = py::make_tuple(rep.ci_lo, rep.ci_hi);
            d["evidence"] = std::string(to_string(rep.evidence));
            return d;
        },
        py::arg("name"), py::arg("r") = 0, py::arg("s") = 0, py::arg("sequences") = 0, py::arg("threads") = 1);
}
