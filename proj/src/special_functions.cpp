#include "gvmbayes/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gvmbayes/errors.hpp"

namespace gvm {
namespace {

constexpr double kSeriesLimit = 20.0;
constexpr double kOverflowLimit = 700.0;

// The large-argument expansion of I_0 bottoms out near exp(-2z). 20 is
// enough for double; extended precision needs a little more headroom, and
// the all-positive power series stays accurate well beyond that.
template <class T>
constexpr T series_limit() {
    return std::numeric_limits<T>::digits > 53 ? T(30) : T(kSeriesLimit);
}

void check_args(int nu, double z) {
    if (nu < 0) throw InvalidArgument("bessel order must be non-negative, got " + std::to_string(nu));
    if (!(z >= 0.0) || !std::isfinite(z))
        throw InvalidArgument("bessel argument must be finite and non-negative");
}

// log of (z/2)^nu / nu!
template <class T>
T log_leading_term(int nu, T z) {
    using std::log;
    using std::lgamma;
    if (nu == 0) return T(0);
    return T(nu) * log(z / 2) - lgamma(T(nu) + 1);
}

// I_nu(z) = (z/2)^nu / nu! * sum_k (z^2/4)^k / (k! (k+nu)! / nu!)
// Returns the bracketed sum; every term is positive.
template <class T>
T series_tail_sum(int nu, T z) {
    const T q = z * z / 4;
    const T tol = std::numeric_limits<T>::epsilon() / 16;
    T term = 1;
    T sum = 1;
    for (int k = 1; k < 10000; ++k) {
        term *= q / (T(k) * T(k + nu));
        sum += term;
        if (term < tol * sum) break;
    }
    return sum;
}

template <class T>
T series_value(int nu, T z) {
    using std::exp;
    if (z == 0) return nu == 0 ? T(1) : T(0);
    T lead;
    if (nu <= 100) {
        lead = 1;
        for (int k = 1; k <= nu; ++k) lead *= (z / 2) / T(k);
    } else {
        lead = exp(log_leading_term(nu, z));
    }
    if (lead == 0) return 0;
    return lead * series_tail_sum(nu, z);
}

// exp(-z) I_0(z) for large z: (2 pi z)^(-1/2) sum_k prod_m (2m-1)^2 / (8 m z)
template <class T>
T scaled_i0_asymptotic(T z) {
    using std::sqrt;
    const T tol = std::numeric_limits<T>::epsilon() / 16;
    T term = 1;
    T sum = 1;
    for (int k = 1; k < 1000; ++k) {
        const T next = term * T(2 * k - 1) * T(2 * k - 1) / (T(8 * k) * z);
        if (next >= term) break;  // past the smallest term of the expansion
        term = next;
        sum += term;
        if (term < tol * sum) break;
    }
    return sum / sqrt(2 * std::numbers::pi_v<T> * z);
}

template <class T>
T scaled_i0(T z) {
    using std::exp;
    if (z < series_limit<T>()) return series_value(0, z) * exp(-z);
    return scaled_i0_asymptotic(z);
}

// I_{nu+1}(z) / I_nu(z) by modified Lentz evaluation of
// 1 / (b_1 + 1 / (b_2 + ...)),  b_k = 2 (nu + k) / z.
template <class T>
T order_ratio(int nu, T z) {
    using std::abs;
    if (z == 0) return 0;
    const T tiny = T(1e-30);
    const T eps = std::numeric_limits<T>::epsilon();
    T f = tiny;
    T c = f;
    T d = 0;
    for (int k = 1; k < 200000; ++k) {
        const T b = T(2) * T(nu + k) / z;
        d = b + d;
        if (abs(d) < tiny) d = tiny;
        c = b + 1 / c;
        if (abs(c) < tiny) c = tiny;
        d = 1 / d;
        const T delta = c * d;
        f *= delta;
        if (abs(delta - 1) < eps) return f;
    }
    throw NonConvergence("bessel order-ratio continued fraction did not converge");
}

// Fills ratios[k] = I_{k+1}(z) / I_k(z) for k = 0..top.
template <class T>
void fill_ratios(int top, T z, std::vector<T>& ratios) {
    ratios.assign(static_cast<std::size_t>(top) + 1, T(0));
    if (z == 0) return;
    ratios[top] = order_ratio(top, z);
    for (int k = top; k >= 1; --k) ratios[k - 1] = 1 / (T(2 * k) / z + ratios[k]);
}

template <class T>
std::vector<T> scaled_sequence(int max_order, T z) {
    std::vector<T> out(static_cast<std::size_t>(max_order) + 1, T(0));
    out[0] = scaled_i0(z);
    if (max_order == 0 || z == 0) return out;
    std::vector<T> ratios;
    fill_ratios(max_order - 1, z, ratios);
    for (int k = 0; k < max_order; ++k) out[k + 1] = out[k] * ratios[k];
    return out;
}

// sum_{k<nu} log(I_{k+1}/I_k)
double log_ratio_product(int nu, double z) {
    std::vector<double> ratios;
    fill_ratios(nu - 1, z, ratios);
    double acc = 0.0;
    for (double r : ratios) acc += std::log(r);
    return acc;
}

}  // namespace

double bessel_i(int nu, double z) {
    check_args(nu, z);
    if (z > kOverflowLimit)
        throw OverflowRisk("bessel_i argument " + std::to_string(z) + " exceeds 700; use log_bessel_i");
    if (z < kSeriesLimit) return series_value(nu, z);
    return std::exp(z) * bessel_i_scaled(nu, z);
}

double bessel_i_scaled(int nu, double z) {
    check_args(nu, z);
    if (nu == 0) return scaled_i0(z);
    if (z < kSeriesLimit) return series_value(nu, z) * std::exp(-z);
    return std::exp(std::log(scaled_i0(z)) + log_ratio_product(nu, z));
}

double log_bessel_i(int nu, double z) {
    check_args(nu, z);
    if (z == 0.0) return nu == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (z < kSeriesLimit) return log_leading_term(nu, z) + std::log(series_tail_sum(nu, z));
    const double log_i0 = z + std::log(scaled_i0_asymptotic(z));
    return nu == 0 ? log_i0 : log_i0 + log_ratio_product(nu, z);
}

double log_bessel_i0(double z) { return log_bessel_i(0, z); }

std::vector<double> bessel_i_scaled_sequence(int max_order, double z) {
    check_args(max_order, z);
    return scaled_sequence(max_order, z);
}

std::vector<long double> bessel_i_scaled_sequence(int max_order, long double z) {
    check_args(max_order, static_cast<double>(z));
    return scaled_sequence(max_order, z);
}

}  // namespace gvm
