#pragma once

#include <numbers>
#include <optional>
#include <vector>

namespace gvm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Maps an angle onto [0, 2pi). Idempotent.
double reduce_two_pi(double theta);
/// Maps an angle onto [0, pi). Idempotent.
double reduce_pi(double theta);
/// Shortest distance between two points of the circle of circumference pi.
double axial_distance(double a, double b);

/// von Mises parameters. mu is reduced onto [0, 2pi) on construction.
class VMParams {
public:
    VMParams(double mu, double kappa);
    double mu() const { return mu_; }
    double kappa() const { return kappa_; }

private:
    double mu_;
    double kappa_;
};

/// Axial von Mises parameters; the density lives on [0, pi).
class VM2Params {
public:
    VM2Params(double mu, double kappa);
    double mu() const { return mu_; }
    double kappa() const { return kappa_; }

private:
    double mu_;
    double kappa_;
};

/// Generalized von Mises GvM(mu1, mu2, kappa1, kappa2). mu1 is reduced onto
/// [0, 2pi), mu2 onto [0, pi); both concentrations must be positive.
class GvMParams {
public:
    GvMParams(double mu1, double mu2, double kappa1, double kappa2);

    double mu1() const { return mu1_; }
    double mu2() const { return mu2_; }
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }
    /// Shift between the two cosines, (mu1 - mu2) mod pi.
    double delta() const { return reduce_pi(mu1_ - mu2_); }

private:
    double mu1_;
    double mu2_;
    double kappa1_;
    double kappa2_;
};

/// Normalizing constant G0(delta, kappa1, kappa2) of the GvM density for a
/// fixed pair of concentrations, reusable across many shifts.
///
/// Evaluated from the Fourier-Bessel series
///   G0 = I0(k1) I0(k2) + 2 sum_j I_2j(k1) I_j(k2) cos(2 j delta)
/// with coefficients precomputed in extended precision. When the series
/// would cancel badly (G0 at delta is many orders of magnitude below the sum
/// of absolute terms), the value is taken from a max-shifted trapezoid rule,
/// which converges geometrically for this periodic integrand.
class GvMNormalizer {
public:
    GvMNormalizer(double kappa1, double kappa2);

    /// log G0(delta, kappa1, kappa2); delta is reduced mod pi.
    double log_value(double delta) const;
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }
    /// Number of series terms retained after the constant term.
    int terms() const { return static_cast<int>(coeffs_.size()) - 1; }
    /// True when log_value(delta) uses the series rather than the quadrature.
    bool series_usable(double delta) const;

private:
    double quadrature_log_value(double delta) const;

    double kappa1_;
    double kappa2_;
    // exp(-k1-k2) I_2j(k1) I_j(k2), j = 0..terms
    std::vector<long double> coeffs_;
    long double abs_sum_;
};

/// G0(delta, kappa1, kappa2). Throws OverflowRisk if the value exceeds the
/// double range (kappa1 + kappa2 beyond ~700); use log_gvm_norm_const there.
double gvm_norm_const(double delta, double kappa1, double kappa2);
double log_gvm_norm_const(double delta, double kappa1, double kappa2);

double gvm_log_density(double theta, const GvMParams& p);
double vm_log_density(double theta, const VMParams& p);
/// Axial von Mises log density. Throws InvalidArgument for theta outside [0, pi).
double vm2_log_density(double theta, const VM2Params& p);

enum class Modality { unimodal, bimodal };

struct ModeStructure {
    Modality kind;
    std::vector<double> modes;
};

/// Mode structure for delta = 0: bimodal at mu1 and mu1 + pi iff
/// kappa1 < 4 kappa2, unimodal at mu1 otherwise. Throws UnsupportedCase when
/// delta is not 0 (within 1e-12, circularly mod pi).
ModeStructure classify_modes(const GvMParams& p);

/// Coefficients of the degree-two trigonometric polynomial
///   log f(theta) - log f(alpha - theta)
///     = a1 cos(theta) + b1 sin(theta) + a2 cos(2 theta) + b2 sin(2 theta).
/// All four vanish iff the density is symmetric about alpha / 2.
struct SymmetryResidual {
    double a1;
    double b1;
    double a2;
    double b2;

    double max_abs() const;
};

SymmetryResidual axial_symmetry_residual(const GvMParams& p, double alpha);

struct AxialSymmetry {
    bool symmetric;
    std::optional<double> axis;  // mu1 when symmetric
};

/// delta within tol of 0 or pi/2 (circularly) means axial symmetry about mu1.
AxialSymmetry is_axially_symmetric(const GvMParams& p, double tol);

}  // namespace gvm
