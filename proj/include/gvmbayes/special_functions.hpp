#pragma once

#include <vector>

namespace gvm {

/// Modified Bessel function of the first kind I_nu(z) for integer nu >= 0 and
/// real z in [0, 700].
///
/// Power series below z = 20; above, the exponentially scaled large-argument
/// expansion of I_0 combined with continued-fraction order ratios.
/// Throws InvalidArgument for nu < 0 or z < 0 (or NaN) and OverflowRisk for
/// z > 700.
double bessel_i(int nu, double z);

/// exp(-z) * I_nu(z). Defined for every finite z >= 0; never overflows.
double bessel_i_scaled(int nu, double z);

/// log I_nu(z) for z >= 0. Returns -inf for nu > 0 and z == 0.
double log_bessel_i(int nu, double z);

/// log I_0(z), finite for any finite z >= 0 (tested up to 1e8).
double log_bessel_i0(double z);

/// exp(-z) * I_k(z) for k = 0..max_order, computed together by downward
/// ratio recurrence seeded by a continued fraction at the top order.
std::vector<double> bessel_i_scaled_sequence(int max_order, double z);

/// Extended-precision variant used where the caller sums many terms with
/// cancellation (the generalized von Mises normalizer).
std::vector<long double> bessel_i_scaled_sequence(int max_order, long double z);

}  // namespace gvm
