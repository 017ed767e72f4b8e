#include "gvmbayes/circular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gvmbayes/errors.hpp"
#include "gvmbayes/special_functions.hpp"

namespace gvm {
namespace {

constexpr int kMaxSeriesTerms = 500;
constexpr long double kSeriesTolerance = 1e-19L;
// Largest tolerated ratio (sum of |series terms|) / G0 before switching to
// quadrature; extended-precision coefficients keep ~1e-18 relative accuracy.
const double kLogMaxCancellation = std::log(1e5);

void require_concentration(double kappa, const char* name) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidArgument(std::string(name) + " must be finite and > 0");
}

double require_finite_angle(double a, const char* name) {
    if (!std::isfinite(a)) throw InvalidArgument(std::string(name) + " must be finite");
    return a;
}

int initial_term_guess(double kappa1, double kappa2) {
    // I_nu(z) / I_0(z) ~ exp(-nu^2 / 2z); either factor of the product
    // dropping below 1e-20 is enough to end the series.
    const double j1 = std::sqrt(23.0 * kappa1);
    const double j2 = std::sqrt(92.0 * kappa2);
    return std::min(kMaxSeriesTerms, 10 + static_cast<int>(std::ceil(std::min(j1, j2))));
}

int quadrature_nodes(double kappa1, double kappa2) {
    const double band = std::sqrt(92.0 * kappa1) + 2.0 * std::sqrt(92.0 * kappa2) + 32.0;
    const int n = static_cast<int>(std::ceil(band / 64.0)) * 64;
    return std::max(128, n);
}

}  // namespace

double reduce_two_pi(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

double reduce_pi(double theta) {
    double r = std::fmod(theta, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r = 0.0;
    return r;
}

double axial_distance(double a, double b) {
    const double d = reduce_pi(a - b);
    return std::min(d, kPi - d);
}

VMParams::VMParams(double mu, double kappa) : mu_(reduce_two_pi(require_finite_angle(mu, "mu"))), kappa_(kappa) {
    require_concentration(kappa, "kappa");
}

VM2Params::VM2Params(double mu, double kappa) : mu_(reduce_pi(require_finite_angle(mu, "mu"))), kappa_(kappa) {
    require_concentration(kappa, "kappa");
}

GvMParams::GvMParams(double mu1, double mu2, double kappa1, double kappa2)
    : mu1_(reduce_two_pi(require_finite_angle(mu1, "mu1"))),
      mu2_(reduce_pi(require_finite_angle(mu2, "mu2"))),
      kappa1_(kappa1),
      kappa2_(kappa2) {
    require_concentration(kappa1, "kappa1");
    require_concentration(kappa2, "kappa2");
}

GvMNormalizer::GvMNormalizer(double kappa1, double kappa2) : kappa1_(kappa1), kappa2_(kappa2) {
    require_concentration(kappa1, "kappa1");
    require_concentration(kappa2, "kappa2");

    int terms = initial_term_guess(kappa1, kappa2);
    for (;;) {
        const auto i1 = bessel_i_scaled_sequence(2 * terms, static_cast<long double>(kappa1));
        const auto i2 = bessel_i_scaled_sequence(terms, static_cast<long double>(kappa2));
        coeffs_.assign(static_cast<std::size_t>(terms) + 1, 0.0L);
        abs_sum_ = 0.0L;
        int last = 0;
        for (int j = 0; j <= terms; ++j) {
            coeffs_[j] = i1[2 * j] * i2[j];
            abs_sum_ += (j == 0 ? 1.0L : 2.0L) * coeffs_[j];
            last = j;
            // Both Bessel factors decrease in the order, so the terms do too.
            if (j > 0 && coeffs_[j] < kSeriesTolerance * abs_sum_) break;
        }
        if (last < terms || coeffs_[terms] < kSeriesTolerance * abs_sum_) {
            coeffs_.resize(static_cast<std::size_t>(last) + 1);
            return;
        }
        if (terms == kMaxSeriesTerms)
            throw NonConvergence("G0 series did not converge within 500 terms");
        terms = std::min(kMaxSeriesTerms, 2 * terms);
    }
}

bool GvMNormalizer::series_usable(double delta) const {
    // Lower bound on G0 from the exponent at theta = 0 and theta = -delta,
    // discounted by the width of the dominant peak.
    const double c = std::abs(std::cos(delta));
    const double peak = std::max(kappa1_ + kappa2_ * std::cos(2.0 * delta), kappa2_ + kappa1_ * c);
    const double width = 0.5 * std::log(kTwoPi * (kappa1_ + 4.0 * kappa2_) + 1.0);
    const double log_cancel = std::log(static_cast<double>(abs_sum_)) + (kappa1_ + kappa2_) - peak + width;
    return log_cancel <= kLogMaxCancellation;
}

double GvMNormalizer::log_value(double delta) const {
    delta = reduce_pi(delta);
    if (!series_usable(delta)) return quadrature_log_value(delta);

    const long double c2 = std::cos(2.0L * static_cast<long double>(delta));
    long double prev = 1.0L;  // cos(0)
    long double cur = c2;     // cos(2 delta)
    long double sum = coeffs_[0];
    for (std::size_t j = 1; j < coeffs_.size(); ++j) {
        sum += 2.0L * coeffs_[j] * cur;
        const long double next = 2.0L * c2 * cur - prev;
        prev = cur;
        cur = next;
    }
    return kappa1_ + kappa2_ + static_cast<double>(std::log(sum));
}

double GvMNormalizer::quadrature_log_value(double delta) const {
    const int n = quadrature_nodes(kappa1_, kappa2_);
    std::vector<double> h(static_cast<std::size_t>(n));
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        h[i] = kappa1_ * std::cos(t) + kappa2_ * std::cos(2.0 * (t + delta));
        top = std::max(top, h[i]);
    }
    long double acc = 0.0L;
    for (double v : h) acc += std::exp(static_cast<long double>(v - top));
    return top + static_cast<double>(std::log(acc / n));
}

double log_gvm_norm_const(double delta, double kappa1, double kappa2) {
    return GvMNormalizer(kappa1, kappa2).log_value(require_finite_angle(delta, "delta"));
}

double gvm_norm_const(double delta, double kappa1, double kappa2) {
    const double lv = log_gvm_norm_const(delta, kappa1, kappa2);
    if (lv > std::log(std::numeric_limits<double>::max()))
        throw OverflowRisk("G0 exceeds the double range; use log_gvm_norm_const");
    return std::exp(lv);
}

double gvm_log_density(double theta, const GvMParams& p) {
    return p.kappa1() * std::cos(theta - p.mu1()) + p.kappa2() * std::cos(2.0 * (theta - p.mu2())) -
           std::log(kTwoPi) - log_gvm_norm_const(p.delta(), p.kappa1(), p.kappa2());
}

double vm_log_density(double theta, const VMParams& p) {
    return p.kappa() * std::cos(theta - p.mu()) - std::log(kTwoPi) - log_bessel_i0(p.kappa());
}

double vm2_log_density(double theta, const VM2Params& p) {
    if (!(theta >= 0.0 && theta < kPi)) throw InvalidArgument("axial angle must lie in [0, pi)");
    return p.kappa() * std::cos(2.0 * (theta - p.mu())) - std::log(kPi) - log_bessel_i0(p.kappa());
}

ModeStructure classify_modes(const GvMParams& p) {
    if (axial_distance(p.delta(), 0.0) > 1e-12)
        throw UnsupportedCase("mode classification is only available for delta = 0");
    if (p.kappa1() < 4.0 * p.kappa2())
        return {Modality::bimodal, {p.mu1(), reduce_two_pi(p.mu1() + kPi)}};
    return {Modality::unimodal, {p.mu1()}};
}

double SymmetryResidual::max_abs() const {
    return std::max({std::abs(a1), std::abs(b1), std::abs(a2), std::abs(b2)});
}

SymmetryResidual axial_symmetry_residual(const GvMParams& p, double alpha) {
    const double k1 = p.kappa1();
    const double k2 = p.kappa2();
    const double m1 = p.mu1();
    const double m2 = p.mu2();
    return {
        k1 * (std::cos(m1) - std::cos(alpha - m1)),
        k1 * (std::sin(m1) - std::sin(alpha - m1)),
        k2 * (std::cos(2.0 * m2) - std::cos(2.0 * (alpha - m2))),
        k2 * (std::sin(2.0 * m2) - std::sin(2.0 * (alpha - m2))),
    };
}

AxialSymmetry is_axially_symmetric(const GvMParams& p, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be > 0");
    const double d = p.delta();
    const double gap = std::min({d, std::abs(d - kHalfPi), kPi - d});
    if (gap <= tol) return {true, p.mu1()};
    return {false, std::nullopt};
}

}  // namespace gvm
