#pragma once

#include <array>
#include <span>
#include <vector>

#include "gvmbayes/circular.hpp"

namespace gvm {

/// Observed angles, each reduced onto [0, 2pi). An empty sample is allowed
/// (flat likelihood); model fitting needs at least four points.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::vector<double> angles);

    std::span<const double> angles() const { return angles_; }
    std::size_t size() const { return angles_.size(); }
    bool empty() const { return angles_.empty(); }
    Sample concatenated(const Sample& other) const;

private:
    std::vector<double> angles_;
};

/// Parameters held fixed while one parameter is tested.
///
/// The shift tests (delta) read mu1, kappa1, kappa2; the von Mises test
/// (kappa2) reads mu1, mu2, kappa1 and uses delta0 = (mu1 - mu2) mod pi.
struct FixedNuisance {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double kappa1 = 1.0;
    double kappa2 = 1.0;

    static FixedNuisance for_shift_tests(double mu1, double kappa1, double kappa2);
    static FixedNuisance for_vm_test(double mu1, double mu2, double kappa1);
    double delta0() const { return reduce_pi(mu1 - mu2); }
};

/// Sums over the sample of cos(theta - mu1), cos 2(theta - mu1) and
/// sin 2(theta - mu1): everything the tested likelihoods need.
struct CenteredTrigSums {
    std::size_t n = 0;
    double cos1 = 0.0;
    double cos2 = 0.0;
    double sin2 = 0.0;

    CenteredTrigSums(const Sample& sample, double mu1);
};

/// log f(theta | delta') with mu1, kappa1, kappa2 fixed; mu2 = mu1 - delta'.
/// Reuses the G0 coefficients across calls.
class ShiftLikelihood {
public:
    ShiftLikelihood(const Sample& sample, const FixedNuisance& nuisance);
    double operator()(double delta_prime) const;

private:
    CenteredTrigSums sums_;
    double kappa1_;
    double kappa2_;
    GvMNormalizer normalizer_;
};

/// log f(theta | kappa2') with mu1, mu2, kappa1 fixed. kappa2' = 0 gives the
/// von Mises log-likelihood.
class ConcentrationLikelihood {
public:
    ConcentrationLikelihood(const Sample& sample, const FixedNuisance& nuisance);
    double operator()(double kappa2_prime) const;

private:
    CenteredTrigSums sums_;
    double kappa1_;
    double delta0_;
    double shifted_cos2_;  // sum cos 2(theta - mu1 + delta0)
    double log_i0_kappa1_;
};

double loglik_delta(const Sample& sample, double delta_prime, const FixedNuisance& nuisance);
double loglik_kappa2(const Sample& sample, double kappa2_prime, const FixedNuisance& nuisance);

/// Full GvM log-likelihood sum_i log f(theta_i | p).
double gvm_log_likelihood(const Sample& sample, const GvMParams& p);

/// Analytic score d loglik / d(mu1, mu2, kappa1, kappa2).
std::array<double, 4> gvm_score(const Sample& sample, const GvMParams& p);

struct FitOptions {
    int max_iterations = 10'000;
    double gradient_tolerance = 1e-6;
};

struct MLEFit {
    GvMParams params;
    double log_likelihood;
    bool converged;
    int iterations;
    double gradient_norm;
    /// Objective after every accepted iteration, in order.
    std::vector<double> ascent_trace;
};

/// Maximum-likelihood fit of the four GvM parameters.
///
/// Nelder-Mead on (mu1, mu2, log kappa1, log kappa2) from trigonometric
/// moment estimates, then Newton steps in the natural exponential-family
/// coordinates (the log-likelihood is concave there) until the score norm is
/// below the tolerance. Non-convergence is reported through `converged`, not
/// thrown. Requires at least four observations.
MLEFit fit_mle(const Sample& sample, const FitOptions& options = {});

/// Approximate leave-one-out influence of each point: -log f(theta_i | fit).
std::vector<double> point_influence(const Sample& sample, const GvMParams& fit);

/// Drops points whose influence exceeds `threshold`.
Sample trim_influential(const Sample& sample, const GvMParams& fit, double threshold);

}  // namespace gvm
