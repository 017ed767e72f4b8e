#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gvmbayes/angle_io.hpp"
#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/records.hpp"

using namespace gvm;

namespace {

struct Run {
    int code;
    std::string out;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string(GVM_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp(const std::string& name) { return std::string(GVM_TEST_TMPDIR) + "/" + name; }

std::string fixture() { return std::string(GVM_DATA_DIR) + "/wind_synthetic.csv"; }

std::string first_record(const std::string& out, const std::string& type) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("record=" + type, 0) == 0) return line;
    FAIL("no " << type << " record in output");
    return {};
}

}  // namespace

TEST_CASE("fit on the bundled fixture") {
    const auto r = cli("fit " + fixture() + " --format records");
    REQUIRE(r.code == 0);
    const auto fit = parse_mle_fit(first_record(r.out, "mle_fit"));
    CHECK(std::abs(std::remainder(fit.params.mu1() - 4.095, kTwoPi)) < 0.15);
    CHECK(axial_distance(fit.params.mu2(), 0.869) < 0.15);
    CHECK(std::abs(fit.params.kappa1() - 0.304) < 0.15);
    CHECK(std::abs(fit.params.kappa2() - 1.910) < 0.15);
    CHECK(fit.converged);

    const auto table = cli("fit " + fixture());
    CHECK(table.code == 0);
    CHECK(table.out.find("delta") != std::string::npos);
}

TEST_CASE("fit exit codes") {
    std::ofstream(tmp("cli_empty.csv")) << "";
    CHECK(cli("fit " + tmp("cli_empty.csv")).code == 4);
    CHECK(cli("fit " + tmp("nope.csv")).code == 3);
    CHECK(cli("fit").code == 2);
    CHECK(cli("fit " + fixture() + " --max-iterations 1").code == 5);
    CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("degree input gives the same fit") {
    AngleFileSpec spec;
    spec.path = fixture();
    const auto s = read_angles(spec);
    std::ofstream deg(tmp("cli_deg.csv"));
    deg << "theta\n";
    char buf[64];
    for (double v : s.angles()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v * 180.0 / kPi);
        deg << buf;
    }
    deg.close();
    const auto a = parse_mle_fit(first_record(cli("fit " + fixture() + " --format records").out, "mle_fit"));
    const auto b = parse_mle_fit(
        first_record(cli("fit " + tmp("cli_deg.csv") + " --degrees --format records").out, "mle_fit"));
    CHECK(a.params.mu1() == doctest::Approx(b.params.mu1()).epsilon(1e-9));
    CHECK(a.params.mu2() == doctest::Approx(b.params.mu2()).epsilon(1e-9));
    CHECK(a.params.kappa1() == doctest::Approx(b.params.kappa1()).epsilon(1e-9));
    CHECK(a.params.kappa2() == doctest::Approx(b.params.kappa2()).epsilon(1e-9));
}

TEST_CASE("trimming refits on fewer points") {
    const auto r = cli("fit " + fixture() + " --trim-threshold 3.0");
    CHECK(r.code == 0);
    CHECK(r.out.find("after trimming") != std::string::npos);
}

TEST_CASE("test needs nuisance values") {
    const auto r = cli("test " + fixture());
    CHECK(r.code == 2);
    CHECK(cli("test " + fixture() + " --mu1 1 --kappa1 1").code == 2);
    CHECK(cli("test " + fixture() + " --kind bogus --mu1 1 --kappa1 1 --kappa2 1").code == 4);
}

TEST_CASE("test output equals the library result") {
    const std::string nuis = " --mu1 3.141592653589793 --kappa1 0.1 --kappa2 5.5";
    const auto h0 = tmp("cli_h0.csv");
    REQUIRE(cli("sample --mu1 3.141592653589793 --mu2 3.141592653589793 --kappa1 0.1 --kappa2 5.5 --n 50 --seed 5 --out " +
                h0)
                .code == 0);
    const auto r = cli("test " + h0 + nuis + " --seed 9 --s 20000 --format records");
    REQUIRE(r.code == 0);
    const auto printed = parse_bayes_factor(first_record(r.out, "bayes_factor"));

    AngleFileSpec spec;
    spec.path = h0;
    Rng rng(9);
    const auto lib = bayes_factor(read_angles(spec), PriorSpec{VM2Params(0.0, 300.0)},
                                  PerturbationConfig(0.18, TestKind::no_shift),
                                  FixedNuisance::for_shift_tests(kPi, 0.1, 5.5), 20000, rng);
    CHECK(printed.b01 == lib.b01);
    CHECK(printed.mc_std_error == lib.mc_std_error);
    CHECK(cli("test " + h0 + nuis + " --seed 9 --s 20000 --format records").out == r.out);
}

TEST_CASE("test with nuisance from a fit file") {
    const auto fit_file = tmp("cli_fit.rec");
    REQUIRE(cli("fit " + fixture() + " --format records --out " + fit_file).code == 0);
    const auto r = cli("test " + fixture() + " --fit-file " + fit_file + " --s 20000 --format records");
    REQUIRE(r.code == 0);
    const auto bf = parse_bayes_factor(first_record(r.out, "bayes_factor"));
    CHECK(std::isfinite(bf.log_b01));
    CHECK(bf.evidence == interpret_log_bf(bf.log_b01));
}

TEST_CASE("null data support the null across seeds") {
    const std::string nuis = " --mu1 3.141592653589793 --kappa1 0.1 --kappa2 5.5";
    int supports = 0, axial = 0;
    const int seeds = 40;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto file = tmp("cli_h0_seed.csv");
        REQUIRE(cli("sample --mu1 3.141592653589793 --mu2 3.141592653589793 --kappa1 0.1 --kappa2 5.5 --n 50 --seed " +
                    std::to_string(seed) + " --out " + file)
                    .code == 0);
        const auto d = parse_bayes_factor(
            first_record(cli("test " + file + nuis + " --format records --seed " + std::to_string(seed)).out,
                         "bayes_factor"));
        supports += d.b01 >= 1.5;
        const auto a = parse_bayes_factor(first_record(
            cli("test " + file + nuis + " --kind axial_symmetry --tau 20 --epsilon 0.05 --s 20000 --format records --seed " +
                std::to_string(seed))
                .out,
            "bayes_factor"));
        axial += a.b01 > 1.0;
    }
    CHECK(supports >= 0.9 * seeds);
    CHECK(axial >= 0.9 * seeds);
}

TEST_CASE("config file values sit below flags") {
    std::ofstream(tmp("cli.cfg")) << "[test]\ntau=20\nepsilon=0.05\nmu1=3.141592653589793\nkappa1=0.1\nkappa2=5.5\n";
    const auto from_cfg = parse_bayes_factor(
        first_record(cli("--config " + tmp("cli.cfg") + " test " + fixture() + " --s 2000 --format records").out,
                     "bayes_factor"));
    CHECK(from_cfg.prior_atom_masses[0] == doctest::Approx(0.176).epsilon(0.01));
    const auto flagged = parse_bayes_factor(first_record(
        cli("--config " + tmp("cli.cfg") + " test " + fixture() + " --tau 50 --s 2000 --format records").out,
        "bayes_factor"));
    CHECK(flagged.prior_atom_masses[0] == doctest::Approx(0.276).epsilon(0.01));
}

TEST_CASE("simulate") {
    CHECK(cli("simulate D9").code == 2);
    const auto r = cli("simulate D1 --format records");
    REQUIRE(r.code == 0);
    const auto rep = parse_study_report(first_record(r.out, "study_report"));
    CHECK(rep.ci_lo > 2.5);
    CHECK(rep.ci_hi < 3.4);
    CHECK(cli("simulate D1 --format records").out.substr(0, 200) == r.out.substr(0, 200));

    const auto s1 = cli("simulate S1");
    REQUIRE(s1.code == 0);
    CHECK(s1.out.find("S1") != std::string::npos);
    CHECK(s1.out.find("positive") != std::string::npos);
}

TEST_CASE("density") {
    const auto r = cli("density --mu1 1.5707963267948966 --mu2 0 --kappa1 5.5 --kappa2 0.1 --grid 512");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,density");
    std::vector<double> theta, dens;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        theta.push_back(std::stod(line.substr(0, comma)));
        dens.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(theta.size() == 512);
    CHECK(theta.front() == doctest::Approx(-kTwoPi));
    const GvMParams p(kHalfPi, 0.0, 5.5, 0.1);
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(dens[i] == std::exp(gvm_log_density(theta[i], p)));
    // Grid step is pi/128, so pi - theta_i is grid point 640 - i.
    for (std::size_t i = 129; i < 512; ++i) CHECK(dens[i] == doctest::Approx(dens[640 - i]).epsilon(1e-12));

    CHECK(cli("density --grid 7 --from 0 --to 1 --format records").out.find("record=density theta=0 ") == 0);
}

TEST_CASE("sample is deterministic per seed") {
    const auto a = cli("sample --n 20 --seed 3 --kappa1 2 --kappa2 1");
    const auto b = cli("sample --n 20 --seed 3 --kappa1 2 --kappa2 1");
    const auto c = cli("sample --n 20 --seed 4 --kappa1 2 --kappa2 1");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(cli("sample --kappa1 -1").code == 7);
}
