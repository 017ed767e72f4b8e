#include <doctest.h>

#include <cmath>

#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/errors.hpp"
#include "oracles.hpp"

using namespace gvm;

namespace {

const FixedNuisance kShift = FixedNuisance::for_shift_tests(kPi, 0.1, 5.5);
const FixedNuisance kVm = FixedNuisance::for_vm_test(kPi, kHalfPi, 0.1);

PriorSpec vm2(double tau) { return {VM2Params(0.0, tau)}; }
PriorSpec mixture(double tau, double xi = 0.5) { return {MixtureVM2Prior::symmetric(0.0, kHalfPi, tau, xi)}; }
PriorSpec uniform(double lo, double hi) { return {UniformPrior(lo, hi)}; }

Sample shift_sample(double delta, std::size_t n, std::uint64_t seed) {
    Rng r(seed);
    return Sample(sample_gvm_n(GvMParams(kPi, kPi - delta, 0.1, 5.5), n, r));
}

double mean_b01(const PriorSpec& prior, const PerturbationConfig& cfg, const FixedNuisance& nuis,
                const std::function<Sample(std::uint64_t)>& make, int reps, std::uint64_t seed) {
    double sum = 0;
    for (int i = 0; i < reps; ++i) {
        Rng mc(stream_seed(seed, 2 * i + 1));
        sum += bayes_factor(make(stream_seed(seed, 2 * i)), prior, cfg, nuis, 2000, mc).b01;
    }
    return sum / reps;
}

}  // namespace

TEST_CASE("null neighbourhoods") {
    const PerturbationConfig a(0.05, TestKind::no_shift);
    CHECK(a.in_null_set(0.0));
    CHECK(a.in_null_set(0.025));
    CHECK(a.in_null_set(kPi - 0.02));
    CHECK_FALSE(a.in_null_set(0.026));
    CHECK_FALSE(a.in_null_set(kHalfPi));
    const PerturbationConfig b(0.05, TestKind::axial_symmetry);
    CHECK(b.in_null_set(kHalfPi + 0.02));
    CHECK_FALSE(b.in_null_set(kHalfPi + 0.03));
    const PerturbationConfig c(0.05, TestKind::vm_symmetry);
    CHECK(c.in_null_set(0.05));
    CHECK_FALSE(c.in_null_set(0.0501));
    CHECK_THROWS_AS(PerturbationConfig(0.0, TestKind::no_shift), InvalidArgument);
    CHECK_THROWS_AS(PerturbationConfig(kPi / 4, TestKind::no_shift), InvalidArgument);
}

TEST_CASE("prior atom masses") {
    const auto check = [](const PriorSpec& p, TestKind k, double expected) {
        const auto pp = compute_p0(p, PerturbationConfig(0.05, k));
        for (const auto& a : pp.atoms) CHECK(std::abs(a.mass - expected) <= 0.001);
    };
    check(vm2(250), TestKind::no_shift, 0.570);
    check(vm2(50), TestKind::no_shift, 0.276);
    check(vm2(20), TestKind::no_shift, 0.176);
    check(mixture(250), TestKind::axial_symmetry, 0.285);
    check(mixture(20), TestKind::axial_symmetry, 0.088);
    const auto k2 = compute_p0(uniform(0, 0.5), PerturbationConfig(0.05, TestKind::vm_symmetry));
    CHECK(k2.atoms[0].mass == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(k2.continuous_weight() == doctest::Approx(0.9));

    // Against an independent Simpson rule on the circular neighbourhood.
    const double lz = std::log(oracle::bessel_i(0, 50.0));
    const auto g = [&](double x) { return std::exp(50.0 * std::cos(2 * x) - lz) / kPi; };
    const double ref = oracle::simpson(g, -0.025, 0.025, 4000);
    CHECK(std::abs(compute_p0(vm2(50), PerturbationConfig(0.05, TestKind::no_shift)).atoms[0].mass - ref) < 1e-9);
}

TEST_CASE("prior family must fit the test") {
    CHECK_THROWS_AS(compute_p0(mixture(20), PerturbationConfig(0.05, TestKind::no_shift)), PriorMismatch);
    CHECK_THROWS_AS(compute_p0(vm2(20), PerturbationConfig(0.05, TestKind::axial_symmetry)), PriorMismatch);
    CHECK_THROWS_AS(compute_p0(vm2(20), PerturbationConfig(0.05, TestKind::vm_symmetry)), PriorMismatch);
    Rng r(1);
    CHECK_THROWS_AS(bf_vm_symmetry(Sample({1.0}), vm2(20), PerturbationConfig(0.05, TestKind::vm_symmetry), kVm, 2000, r),
                    PriorMismatch);
    CHECK_THROWS_AS(bf_no_shift(Sample({1.0}), vm2(20), PerturbationConfig(0.05, TestKind::vm_symmetry), kShift, 2000, r),
                    InvalidArgument);
    CHECK_THROWS_AS(mc_integral_complement(Sample({1.0}), vm2(20), PerturbationConfig(0.05, TestKind::no_shift), kShift,
                                           999, r),
                    InvalidArgument);
}

TEST_CASE("every draw inside the null set is degenerate") {
    Rng r(2);
    CHECK_THROWS_AS(mc_integral_complement(Sample({1.0}), vm2(1e7), PerturbationConfig(0.05, TestKind::no_shift), kShift,
                                           2000, r),
                    DegenerateEstimate);
}

TEST_CASE("flat likelihood integrals") {
    const double eps = 0.05;
    Rng r(3);
    const PerturbationConfig cfg(eps, TestKind::no_shift);
    const auto in = mc_integral_complement(Sample(), uniform(0, kPi), cfg, kShift, 100000, r);
    const double v = std::exp(in.log_value);
    CHECK(std::abs(v - (kPi - eps) / kPi) < 3 * v * in.log_std_error);

    const auto bf = bf_no_shift(Sample(), uniform(0, kPi), cfg, kShift, 100000, r);
    CHECK(bf.numerator_loglik == 0.0);
    CHECK(std::abs(bf.b01 - kPi / (kPi - eps)) < 3 * bf.mc_std_error);

    const auto vm = bf_vm_symmetry(Sample(), uniform(0, 0.5), PerturbationConfig(eps, TestKind::vm_symmetry), kVm, 100000, r);
    CHECK(std::abs(vm.b01 - 0.5 / (0.5 - eps)) < 3 * vm.mc_std_error);
}

TEST_CASE("complement integral against quadrature") {
    const Sample s({0.3, 2.9, 3.5});
    const double eps = 0.05;
    const double lz = std::log(oracle::bessel_i(0, 50.0));
    const auto integrand = [&](double d) {
        double logf = 0;
        const double log_g0 = oracle::log_g0(d, 0.1, 5.5, 512);
        for (double t : s.angles())
            logf += 0.1 * std::cos(t - kPi) + 5.5 * std::cos(2 * (t - kPi + d)) - std::log(2 * kPi) - log_g0;
        return std::exp(logf + 50.0 * std::cos(2 * d) - lz) / kPi;
    };
    const double ref = oracle::simpson(integrand, eps / 2, kPi - eps / 2, 16384);
    Rng r(4);
    const auto in =
        mc_integral_complement(s, vm2(50), PerturbationConfig(eps, TestKind::no_shift), kShift, 100000, r);
    const double v = std::exp(in.log_value);
    CHECK(std::abs(v - ref) < 4 * v * in.log_std_error);
}

TEST_CASE("Bayes factors are deterministic per seed") {
    const auto s = shift_sample(0.0, 50, 5);
    Rng a(9), b(9);
    const PerturbationConfig cfg(0.05, TestKind::no_shift);
    const auto x = bf_no_shift(s, vm2(20), cfg, kShift, 5000, a);
    const auto y = bf_no_shift(s, vm2(20), cfg, kShift, 5000, b);
    CHECK(x.b01 == y.b01);
    CHECK(x.mc_std_error == y.mc_std_error);
    CHECK(x.complement_draws == y.complement_draws);
    CHECK(x.evidence == interpret_bf(x.b01));
    CHECK(x.log_b01 == doctest::Approx(x.numerator_loglik - x.denominator_log_integral));
}

TEST_CASE("no-shift test under the null and far from it") {
    const PerturbationConfig cfg(0.05, TestKind::no_shift);
    const double m = mean_b01(vm2(20), cfg, kShift, [](std::uint64_t sd) { return shift_sample(0.0, 50, sd); }, 2000, 10);
    CHECK(m > 5.2);
    CHECK(m < 5.8);

    int below = 0;
    for (int i = 0; i < 200; ++i) {
        Rng mc(stream_seed(11, i));
        below += bf_no_shift(shift_sample(1.2, 50, stream_seed(12, i)), vm2(20), cfg, kShift, 2000, mc).b01 < 1.0;
    }
    CHECK(below >= 190);
}

TEST_CASE("axial test") {
    const PerturbationConfig cfg(0.05, TestKind::axial_symmetry);
    const double s2 =
        mean_b01(mixture(20), cfg, kShift, [](std::uint64_t sd) { return shift_sample(0.0, 50, sd); }, 2000, 20);
    CHECK(s2 > 5.0);
    CHECK(s2 < 5.7);
    const double s3 =
        mean_b01(mixture(20), cfg, kShift, [](std::uint64_t sd) { return shift_sample(kHalfPi, 50, sd); }, 2000, 21);
    CHECK(s3 > 5.1);
    CHECK(s3 < 5.7);

    // With all weight on the first component the axial factor is the no-shift one.
    const auto s = shift_sample(0.0, 50, 22);
    Rng a(23), b(23);
    const auto ax = bf_axial_symmetry(s, mixture(50, 1.0), cfg, kShift, 20000, a);
    const auto ns = bf_no_shift(s, vm2(50), PerturbationConfig(0.05, TestKind::no_shift), kShift, 20000, b);
    CHECK(ax.prior_atom_masses[1] < 1e-40);
    CHECK(std::abs(ax.b01 - ns.b01) < 3 * (ax.mc_std_error + ns.mc_std_error));
}

TEST_CASE("von Mises test") {
    const PerturbationConfig cfg(0.05, TestKind::vm_symmetry);
    const auto vm_data = [](std::uint64_t sd) {
        Rng r(sd);
        return Sample(sample_vm_n(VMParams(kPi, 0.1), 50, r));
    };
    const double k2 = mean_b01(uniform(0, 0.5), cfg, kVm, vm_data, 2000, 30);
    CHECK(k2 > 3.0);
    CHECK(k2 < 3.6);

    const auto alt = [](std::uint64_t sd) {
        Rng r(sd);
        return Sample(sample_gvm_n(GvMParams(kPi, kHalfPi, 0.1, 0.45), 50, r));
    };
    CHECK(mean_b01(uniform(0, 0.5), cfg, kVm, alt, 200, 31) < 1.0);
}

TEST_CASE("evidence scale") {
    CHECK(interpret_bf(0.5) == Evidence::negative);
    CHECK(interpret_bf(5.5) == Evidence::substantial);
    CHECK(interpret_bf(2.55) == Evidence::positive);
    CHECK(interpret_bf(1.0) == Evidence::bare_mention);
    CHECK(interpret_bf(1.5) == Evidence::positive);
    CHECK(interpret_bf(5.0) == Evidence::substantial);
    CHECK(interpret_bf(10.0) == Evidence::strong);
    CHECK(interpret_bf(20.0) == Evidence::decisive);
    CHECK(interpret_bf(1e300) == Evidence::decisive);
    CHECK(interpret_bf(1e-300) == Evidence::negative);
    CHECK_THROWS_AS(interpret_bf(0.0), InvalidArgument);
    CHECK_THROWS_AS(interpret_bf(-1.0), InvalidArgument);
    int prev = 0;
    for (double b = 0.01; b < 100; b *= 1.01) {
        const int e = static_cast<int>(interpret_bf(b));
        CHECK(e >= prev);
        prev = e;
    }
    CHECK(interpret_log_bf(-800.0) == Evidence::negative);
    for (auto e : {Evidence::negative, Evidence::bare_mention, Evidence::decisive}) CHECK(parse_evidence(to_string(e)) == e);
    CHECK(parse_test_kind("axial") == TestKind::axial_symmetry);
    CHECK_THROWS_AS(parse_test_kind("nope"), ParseError);
}

TEST_CASE("posterior summary") {
    const PerturbationConfig cfg(0.05, TestKind::no_shift);
    const auto s = shift_sample(0.0, 50, 40);
    Rng r(41), q(41);
    const auto post = posterior_summary(s, vm2(50), cfg, kShift, 20000, 512, r);
    CHECK(std::abs(post.total_mass() - 1.0) < 1e-6);
    REQUIRE(post.atoms.size() == 1);
    CHECK(post.atoms[0].prior_mass == doctest::Approx(0.276).epsilon(0.005));

    // Under the null the atom gains mass exactly when b01 > 1, which is the
    // usual outcome.
    int gained = 0;
    for (int i = 0; i < 20; ++i) {
        Rng mc(stream_seed(43, i));
        const auto pi = posterior_summary(shift_sample(0.0, 50, stream_seed(44, i)), vm2(50), cfg, kShift, 2000, 128, mc);
        CHECK((pi.atoms[0].posterior_mass > pi.atoms[0].prior_mass) == (pi.bayes_factor.b01 > 1.0));
        gained += pi.atoms[0].posterior_mass > pi.atoms[0].prior_mass;
    }
    CHECK(gained >= 15);

    // Odds identity: posterior odds = b01 * prior odds.
    const double p0 = post.atoms[0].prior_mass;
    const double r1 = post.bayes_factor.b01 * p0 / (1 - p0);
    CHECK(post.atoms[0].posterior_mass == doctest::Approx(r1 / (1 + r1)).epsilon(1e-12));
    const auto bf = bf_no_shift(s, vm2(50), cfg, kShift, 20000, q);
    CHECK(bf.b01 == post.bayes_factor.b01);

    for (std::size_t g = 0; g < post.grid.size(); ++g)
        if (cfg.in_null_set(post.grid[g])) CHECK(post.density[g] == 0.0);

    const auto ax = posterior_summary(s, mixture(20), PerturbationConfig(0.05, TestKind::axial_symmetry), kShift, 20000,
                                      256, r);
    CHECK(ax.atoms.size() == 2);
    CHECK(std::abs(ax.total_mass() - 1.0) < 1e-6);
    CHECK_THROWS_AS(posterior_summary(s, vm2(50), cfg, kShift, 20000, 32, r), InvalidArgument);
}

TEST_CASE("posterior under a flat likelihood") {
    const PerturbationConfig cfg(0.05, TestKind::no_shift);
    Rng r(42);
    const auto post = posterior_summary(Sample(), vm2(20), cfg, kShift, 200000, 512, r);
    const double p0 = post.atoms[0].prior_mass;
    const double integral = std::exp(post.bayes_factor.denominator_log_integral);
    CHECK(std::abs(integral - (1 - p0)) < 4 * integral * std::exp(std::log(post.bayes_factor.mc_std_error) -
                                                                 post.bayes_factor.log_b01));
    // b01 = 1 / integral, so the posterior atom is p0 / (p0 + (1 - p0) * integral).
    CHECK(post.atoms[0].posterior_mass == doctest::Approx(p0 / (p0 + (1 - p0) * integral)).epsilon(1e-12));
    CHECK(post.atoms[0].posterior_mass == doctest::Approx(p0 / (p0 + (1 - p0) * (1 - p0))).epsilon(0.01));
    // The continuous part keeps the prior's shape off the null set.
    const double ref = post.density[256] / std::exp(vm2_log_density(post.grid[256], VM2Params(0.0, 20.0)));
    for (std::size_t g = 0; g < post.grid.size(); ++g)
        if (post.density[g] > 0)
            CHECK(post.density[g] / std::exp(vm2_log_density(post.grid[g], VM2Params(0.0, 20.0))) ==
                  doctest::Approx(ref).epsilon(1e-9));
}
