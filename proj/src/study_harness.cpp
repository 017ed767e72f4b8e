#include "gvmbayes/study_harness.hpp"

#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "gvmbayes/sampling.hpp"

namespace gvm {
namespace {

constexpr double kEpsilon = 0.05;
constexpr double kMu1 = kPi;
constexpr double kKappa1 = 0.1;
constexpr double kKappa2 = 5.5;

PriorSpec vm2_prior(double tau) { return {VM2Params(0.0, tau)}; }
PriorSpec mixture_prior(double tau) { return {MixtureVM2Prior::symmetric(0.0, kHalfPi, tau, 0.5)}; }

CaseSpec shift_case(CaseName name, PriorSpec prior, TestKind kind, Generator gen, std::uint64_t seed) {
    return CaseSpec{.name = name,
                    .prior = std::move(prior),
                    .cfg = PerturbationConfig(kEpsilon, kind),
                    .generator = gen,
                    .nuisance = FixedNuisance::for_shift_tests(kMu1, kKappa1, kKappa2),
                    .seed = seed};
}

}  // namespace

std::string_view to_string(CaseName name) {
    switch (name) {
        case CaseName::D1: return "D1";
        case CaseName::D1prime: return "D1prime";
        case CaseName::D2: return "D2";
        case CaseName::S1: return "S1";
        case CaseName::S2: return "S2";
        case CaseName::S3: return "S3";
        case CaseName::K2: return "K2";
    }
    return "unknown";
}

CaseName parse_case_name(std::string_view text) {
    if (text == "D1'") return CaseName::D1prime;
    for (auto c : all_cases())
        if (to_string(c) == text) return c;
    throw UnknownCase("unknown case '" + std::string(text) + "'");
}

std::vector<CaseName> all_cases() {
    return {CaseName::D1, CaseName::D1prime, CaseName::D2, CaseName::S1, CaseName::S2, CaseName::S3, CaseName::K2};
}

void CaseSpec::validate() const {
    if (n < 2) throw InvalidArgument("case needs n >= 2");
    if (r < 100) throw InvalidArgument("case needs r >= 100");
    if (sequences < 1) throw InvalidArgument("case needs at least one sequence");
    if (s < 1000) throw InvalidArgument("case needs s >= 1000");
    if (std::holds_alternative<FixedVM>(generator) != (cfg.kind == TestKind::vm_symmetry))
        throw InvalidArgument("the von Mises generator pairs with the kappa2 test only");
}

CaseSpec builtin_case(CaseName name, bool full) {
    CaseSpec spec = [&] {
        switch (name) {
            case CaseName::D1:
                return shift_case(name, vm2_prior(250.0), TestKind::no_shift, PriorDrawDelta{}, 0x5eed0001);
            case CaseName::D1prime:
                return shift_case(name, vm2_prior(50.0), TestKind::no_shift, FixedDelta{0.0}, 0x5eed0002);
            case CaseName::D2:
                return shift_case(name, vm2_prior(20.0), TestKind::no_shift, FixedDelta{0.0}, 0x5eed0003);
            case CaseName::S1:
                return shift_case(name, mixture_prior(250.0), TestKind::axial_symmetry, PriorDrawDelta{},
                                  0x5eed0004);
            case CaseName::S2:
                return shift_case(name, mixture_prior(20.0), TestKind::axial_symmetry, FixedDelta{0.0}, 0x5eed0005);
            case CaseName::S3:
                return shift_case(name, mixture_prior(20.0), TestKind::axial_symmetry, FixedDelta{kHalfPi},
                                  0x5eed0006);
            case CaseName::K2:
                return CaseSpec{.name = name,
                                .prior = PriorSpec{UniformPrior(0.0, 0.5)},
                                .cfg = PerturbationConfig(kEpsilon, TestKind::vm_symmetry),
                                .generator = FixedVM{},
                                .nuisance = FixedNuisance::for_vm_test(kMu1, kHalfPi, kKappa1),
                                .seed = 0x5eed0007};
        }
        throw UnknownCase("unknown case");
    }();
    if (full) spec.r = spec.s = 10'000;
    return spec;
}

CaseSpec builtin_case(std::string_view name, bool full) { return builtin_case(parse_case_name(name), full); }

CiResult aggregate_ci(const std::vector<double>& pool, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
    if (pool.size() < 30) throw InsufficientData("a normal interval needs at least 30 values");
    const double n = static_cast<double>(pool.size());
    const double mean = std::accumulate(pool.begin(), pool.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : pool) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
    const double half = z * sd / std::sqrt(n);
    return {mean, mean - half, mean + half, sd};
}

BayesFactorResult run_replicate(const CaseSpec& spec, std::size_t index) {
    const Rng replicate(stream_seed(spec.seed, index));
    Rng data_rng = replicate.split(0);
    Rng mc_rng = replicate.split(1);
    const auto& nu = spec.nuisance;

    std::vector<double> angles;
    if (std::holds_alternative<FixedVM>(spec.generator)) {
        angles = sample_vm_n(VMParams(nu.mu1, nu.kappa1), spec.n, data_rng);
    } else {
        const double delta = std::holds_alternative<PriorDrawDelta>(spec.generator)
                                 ? spec.prior.sample(data_rng)
                                 : std::get<FixedDelta>(spec.generator).value;
        const GvMParams p(nu.mu1, reduce_pi(nu.mu1 - delta), nu.kappa1, nu.kappa2);
        angles = sample_gvm_n(p, spec.n, data_rng);
    }
    return bayes_factor(Sample(std::move(angles)), spec.prior, spec.cfg, nu, spec.s, mc_rng);
}

StudyReport run_case(const CaseSpec& spec, const RunOptions& options) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t total = spec.r * spec.sequences;
    std::vector<double> b01(total, 0.0);
    std::vector<char> done(total, 0);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            if (failed.load() || (options.stop != nullptr && options.stop->load())) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                b01[i] = run_replicate(spec, i).b01;
                done[i] = 1;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    std::size_t completed = 0;
    while (completed < total && done[completed]) ++completed;
    if (completed < total) throw StudyInterrupted(completed, {b01.begin(), b01.begin() + completed});

    StudyReport report;
    report.name = spec.name;
    report.replicates = total;
    for (std::size_t k = 0; k < spec.sequences; ++k) {
        const auto first = b01.begin() + k * spec.r;
        report.per_sequence_means.push_back(std::accumulate(first, first + spec.r, 0.0) / spec.r);
    }
    const auto ci = aggregate_ci(b01, 0.95);
    report.mean = ci.mean;
    report.sd = ci.sd;
    report.ci_lo = ci.lo;
    report.ci_hi = ci.hi;
    report.evidence = interpret_bf(ci.mean);
    if (spec.keep_raw) report.all_b01 = std::move(b01);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace gvm
