#include <CLI11.hpp>
#include <atomic>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gvmbayes/angle_io.hpp"
#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/errors.hpp"
#include "gvmbayes/inference.hpp"
#include "gvmbayes/records.hpp"
#include "gvmbayes/sampling.hpp"
#include "gvmbayes/study_harness.hpp"

namespace {

using namespace gvm;

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kIo = 3,
    kParse = 4,
    kNonConvergence = 5,
    kDegenerate = 6,
    kInvalidArgument = 7,
    kInterrupted = 130,
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop = true; }

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "table";
};

struct FileOptions {
    std::string path;
    bool degrees = false;
    std::string column;
    std::optional<bool> header;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
    cmd->add_option("--out", c.out, "write output to this file instead of stdout");
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"table", "records"}))
        ->capture_default_str();
}

void add_file(CLI::App* cmd, FileOptions& f) {
    cmd->add_option("file", f.path, "CSV file with one angle column")->required();
    cmd->add_flag("--degrees", f.degrees, "angles in the file are in degrees");
    cmd->add_option("--column", f.column, "angle column: header name or zero-based index");
    cmd->add_flag("--header,!--no-header", f.header, "force header detection on or off");
}

AngleFileSpec to_file_spec(const FileOptions& f) {
    AngleFileSpec spec;
    spec.path = f.path;
    spec.unit = f.degrees ? AngleUnit::degrees : AngleUnit::radians;
    spec.header = f.header;
    if (!f.column.empty()) {
        std::size_t idx = 0;
        const auto [ptr, ec] = std::from_chars(f.column.data(), f.column.data() + f.column.size(), idx);
        if (ec == std::errc() && ptr == f.column.data() + f.column.size())
            spec.column = idx;
        else
            spec.column = f.column;
    }
    return spec;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.out);
    if (!out) throw IoError("cannot write '" + c.out + "'");
    out << text;
    if (!out) throw IoError("cannot write '" + c.out + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MLEFit load_fit(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("record=mle_fit", 0) == 0) return parse_mle_fit(line);
    throw ParseError("'" + path + "' holds no mle_fit record");
}

// ---- fit ----

struct FitArgs {
    Common common;
    FileOptions file;
    double trim_threshold = 0.0;
    int max_iterations = 10'000;
};

int run_fit(const FitArgs& a) {
    Sample sample = read_angles(to_file_spec(a.file));
    FitOptions opts;
    opts.max_iterations = a.max_iterations;
    MLEFit fit = fit_mle(sample, opts);
    if (a.trim_threshold > 0.0) {
        sample = trim_influential(sample, fit.params, a.trim_threshold);
        fit = fit_mle(sample, opts);
    }
    std::string text = a.common.format == "records" ? to_record(fit) + "\n" : format_fit_table(fit);
    if (a.trim_threshold > 0.0 && a.common.format == "table")
        text += "observations   " + std::to_string(sample.size()) + " after trimming\n";
    emit(a.common, text);
    return fit.converged ? kOk : kNonConvergence;
}

// ---- test ----

struct TestArgs {
    Common common;
    FileOptions file;
    std::string kind = "no_shift";
    double epsilon = 0.18;
    std::size_t s = 100'000;
    double tau = 300.0;
    double nu = 0.0;
    double nu2 = kHalfPi;
    double xi = 0.5;
    double kappa2_max = 0.5;
    std::string fit_file;
    std::optional<double> mu1, mu2, kappa1, kappa2;
};

PriorSpec test_prior(const TestArgs& a, TestKind kind) {
    switch (kind) {
        case TestKind::no_shift: return {VM2Params(a.nu, a.tau)};
        case TestKind::axial_symmetry: return {MixtureVM2Prior::symmetric(a.nu, a.nu2, a.tau, a.xi)};
        case TestKind::vm_symmetry: return {UniformPrior(0.0, a.kappa2_max)};
    }
    throw InvalidArgument("unknown test kind");
}

FixedNuisance test_nuisance(const TestArgs& a, TestKind kind) {
    std::optional<double> mu1 = a.mu1, mu2 = a.mu2, k1 = a.kappa1, k2 = a.kappa2;
    if (!a.fit_file.empty()) {
        const auto fit = load_fit(a.fit_file);
        if (!mu1) mu1 = fit.params.mu1();
        if (!mu2) mu2 = fit.params.mu2();
        if (!k1) k1 = fit.params.kappa1();
        if (!k2) k2 = fit.params.kappa2();
    }
    const auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) throw UsageError(std::string("missing nuisance value --") + name + " (or pass --fit-file)");
        return *v;
    };
    if (kind == TestKind::vm_symmetry)
        return FixedNuisance::for_vm_test(need(mu1, "mu1"), need(mu2, "mu2"), need(k1, "kappa1"));
    return FixedNuisance::for_shift_tests(need(mu1, "mu1"), need(k1, "kappa1"), need(k2, "kappa2"));
}

int run_test(const TestArgs& a) {
    const TestKind kind = parse_test_kind(a.kind);
    const FixedNuisance nuisance = test_nuisance(a, kind);
    const Sample sample = read_angles(to_file_spec(a.file));
    const PerturbationConfig cfg(a.epsilon, kind);
    Rng rng(a.common.seed);
    const auto bf = bayes_factor(sample, test_prior(a, kind), cfg, nuisance, a.s, rng);
    emit(a.common, a.common.format == "records" ? to_record(bf) + "\n" : format_bf_table(bf));
    return kOk;
}

// ---- simulate ----

struct SimulateArgs {
    Common common;
    std::vector<std::string> cases;
    bool full = false;
    std::optional<std::size_t> r, s, n, sequences;
    std::optional<double> epsilon;
    bool seed_given = false;
    unsigned threads = 1;
    bool keep_raw = false;
};

int run_simulate(const SimulateArgs& a) {
    std::vector<CaseName> names;
    for (const auto& c : a.cases) {
        if (c == "all") {
            const auto all = all_cases();
            names.insert(names.end(), all.begin(), all.end());
        } else {
            names.push_back(parse_case_name(c));
        }
    }
    std::vector<StudyReport> reports;
    RunOptions opts;
    opts.threads = a.threads;
    opts.stop = &g_stop;
    for (std::size_t k = 0; k < names.size(); ++k) {
        CaseSpec spec = builtin_case(names[k], a.full);
        if (a.r) spec.r = *a.r;
        if (a.s) spec.s = *a.s;
        if (a.n) spec.n = *a.n;
        if (a.sequences) spec.sequences = *a.sequences;
        if (a.epsilon) spec.cfg = PerturbationConfig(*a.epsilon, spec.cfg.kind);
        if (a.seed_given) spec.seed = stream_seed(a.common.seed, k);
        spec.keep_raw = a.keep_raw;
        reports.push_back(run_case(spec, opts));
    }
    std::string text;
    if (a.common.format == "records") {
        for (const auto& r : reports) text += to_record(r) + "\n";
    } else {
        text = format_study_table(reports);
    }
    emit(a.common, text);
    return kOk;
}

// ---- density / sample ----

struct ModelArgs {
    double mu1 = 0.0, mu2 = 0.0, kappa1 = 1.0, kappa2 = 1.0;
};

void add_model(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--mu1", m.mu1)->capture_default_str();
    cmd->add_option("--mu2", m.mu2)->capture_default_str();
    cmd->add_option("--kappa1", m.kappa1)->capture_default_str();
    cmd->add_option("--kappa2", m.kappa2)->capture_default_str();
}

struct DensityArgs {
    Common common;
    ModelArgs model;
    std::size_t grid = 512;
    double from = -kTwoPi;
    double to = kTwoPi;
};

std::string real17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int run_density(const DensityArgs& a) {
    if (a.grid < 1) throw InvalidArgument("grid needs at least one point");
    if (!(a.from < a.to)) throw InvalidArgument("density range needs from < to");
    const GvMParams p(a.model.mu1, a.model.mu2, a.model.kappa1, a.model.kappa2);
    const double step = (a.to - a.from) / static_cast<double>(a.grid);
    std::string text = a.common.format == "records" ? "" : "theta,density\n";
    for (std::size_t i = 0; i < a.grid; ++i) {
        const double theta = a.from + static_cast<double>(i) * step;
        const double d = std::exp(gvm_log_density(theta, p));
        if (a.common.format == "records")
            text += "record=density theta=" + real17(theta) + " density=" + real17(d) + "\n";
        else
            text += real17(theta) + "," + real17(d) + "\n";
    }
    emit(a.common, text);
    return kOk;
}

struct SampleArgs {
    Common common;
    ModelArgs model;
    std::size_t n = 100;
};

int run_sample(const SampleArgs& a) {
    const GvMParams p(a.model.mu1, a.model.mu2, a.model.kappa1, a.model.kappa2);
    Rng rng(a.common.seed);
    std::string text = "theta\n";
    for (double x : sample_gvm_n(p, a.n, rng)) text += real17(x) + "\n";
    emit(a.common, text);
    return kOk;
}

int report(const char* kind, const std::exception& e, int code) {
    std::cerr << "gvmbayes: " << kind << ": " << e.what() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian tests for generalized von Mises models"};
    app.set_config("--config", "", "key=value configuration file (flags override it)");
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit of a GvM model");
    add_common(fit_cmd, fit.common);
    add_file(fit_cmd, fit.file);
    fit_cmd->add_option("--trim-threshold", fit.trim_threshold,
                        "refit after dropping points with -log f above this value (0 keeps all)");
    fit_cmd->add_option("--max-iterations", fit.max_iterations)->capture_default_str();

    TestArgs test;
    auto* test_cmd = app.add_subcommand("test", "Bayes factor for one of the three tests");
    add_common(test_cmd, test.common);
    add_file(test_cmd, test.file);
    test_cmd->add_option("--kind", test.kind, "no_shift, axial_symmetry or vm_symmetry")->capture_default_str();
    test_cmd->add_option("--epsilon", test.epsilon)->capture_default_str();
    test_cmd->add_option("--s", test.s, "Monte Carlo draws")->capture_default_str();
    test_cmd->add_option("--tau", test.tau, "vM2 prior concentration")->capture_default_str();
    test_cmd->add_option("--nu", test.nu, "vM2 prior location (first component)")->capture_default_str();
    test_cmd->add_option("--nu2", test.nu2, "second mixture component location")->capture_default_str();
    test_cmd->add_option("--xi", test.xi, "mixture weight of the first component")->capture_default_str();
    test_cmd->add_option("--kappa2-max", test.kappa2_max, "upper end of the uniform kappa2 prior")
        ->capture_default_str();
    test_cmd->add_option("--fit-file", test.fit_file, "take nuisance values from a fit records file");
    test_cmd->add_option("--mu1", test.mu1);
    test_cmd->add_option("--mu2", test.mu2);
    test_cmd->add_option("--kappa1", test.kappa1);
    test_cmd->add_option("--kappa2", test.kappa2);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run the simulation study for built-in cases");
    add_common(sim_cmd, sim.common);
    sim_cmd->add_option("cases", sim.cases, "case names (D1 D1prime D2 S1 S2 S3 K2) or all")->required();
    sim_cmd->add_flag("--full", sim.full, "r = s = 10000");
    sim_cmd->add_option("--r", sim.r, "replicates per sequence");
    sim_cmd->add_option("--s", sim.s, "Monte Carlo draws per Bayes factor");
    sim_cmd->add_option("--n", sim.n, "sample size");
    sim_cmd->add_option("--sequences", sim.sequences);
    sim_cmd->add_option("--epsilon", sim.epsilon);
    sim_cmd->add_option("--threads", sim.threads)->capture_default_str();
    sim_cmd->add_flag("--keep-raw", sim.keep_raw, "store every b01 in the records output");

    DensityArgs dens;
    auto* dens_cmd = app.add_subcommand("density", "tabulate a GvM density");
    add_common(dens_cmd, dens.common);
    add_model(dens_cmd, dens.model);
    dens_cmd->add_option("--grid", dens.grid)->capture_default_str();
    dens_cmd->add_option("--from", dens.from)->capture_default_str();
    dens_cmd->add_option("--to", dens.to)->capture_default_str();

    SampleArgs samp;
    auto* samp_cmd = app.add_subcommand("sample", "draw from a GvM model as CSV");
    add_common(samp_cmd, samp.common);
    add_model(samp_cmd, samp.model);
    samp_cmd->add_option("--n", samp.n)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    sim.seed_given = sim_cmd->count("--seed") > 0;

    std::signal(SIGINT, on_sigint);
    try {
        if (*fit_cmd) return run_fit(fit);
        if (*test_cmd) return run_test(test);
        if (*sim_cmd) return run_simulate(sim);
        if (*dens_cmd) return run_density(dens);
        if (*samp_cmd) return run_sample(samp);
    } catch (const StudyInterrupted& e) {
        std::cerr << "gvmbayes: interrupted; " << e.completed().size() << " replicates finished before replicate "
                  << e.next_index() << '\n';
        return kInterrupted;
    } catch (const UsageError& e) {
        return report("usage", e, kUsage);
    } catch (const UnknownCase& e) {
        return report("usage", e, kUsage);
    } catch (const IoError& e) {
        return report("i/o error", e, kIo);
    } catch (const ParseError& e) {
        return report("parse error", e, kParse);
    } catch (const NonConvergence& e) {
        return report("no convergence", e, kNonConvergence);
    } catch (const IterationCap& e) {
        return report("no convergence", e, kNonConvergence);
    } catch (const DegenerateEstimate& e) {
        return report("numeric degeneracy", e, kDegenerate);
    } catch (const OverflowRisk& e) {
        return report("numeric degeneracy", e, kDegenerate);
    } catch (const Error& e) {
        return report("invalid argument", e, kInvalidArgument);
    }
    return kUsage;
}
