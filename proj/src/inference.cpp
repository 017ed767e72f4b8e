#include "gvmbayes/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gvmbayes/errors.hpp"
#include "gvmbayes/special_functions.hpp"

namespace gvm {
namespace {

const double kLogTwoPi = std::log(kTwoPi);

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be finite and > 0");
}

// Uncentered trig sums over a sorted copy, so the result does not depend on
// the order of the observations.
struct TrigSums {
    double n = 0.0;
    double c1 = 0.0, s1 = 0.0, c2 = 0.0, s2 = 0.0;

    explicit TrigSums(const Sample& sample) {
        std::vector<double> sorted(sample.angles().begin(), sample.angles().end());
        std::sort(sorted.begin(), sorted.end());
        n = static_cast<double>(sorted.size());
        for (double t : sorted) {
            c1 += std::cos(t);
            s1 += std::sin(t);
            c2 += std::cos(2.0 * t);
            s2 += std::sin(2.0 * t);
        }
    }
};

double loglik_from_sums(const TrigSums& t, double mu1, double mu2, double k1, double k2) {
    const double lin = k1 * (std::cos(mu1) * t.c1 + std::sin(mu1) * t.s1) +
                       k2 * (std::cos(2.0 * mu2) * t.c2 + std::sin(2.0 * mu2) * t.s2);
    return lin - t.n * (kLogTwoPi + log_gvm_norm_const(reduce_pi(mu1 - mu2), k1, k2));
}

// Moments of (cos, sin, cos 2, sin 2) under the GvM with natural
// parameters lambda, by the trapezoid rule on the circle.
struct NaturalMoments {
    Eigen::Vector4d mean;
    Eigen::Matrix4d cov;
};

NaturalMoments natural_moments(const Eigen::Vector4d& lambda) {
    const double k1 = std::hypot(lambda[0], lambda[1]);
    const double k2 = std::hypot(lambda[2], lambda[3]);
    const double band = std::sqrt(92.0 * k1) + 2.0 * std::sqrt(92.0 * k2) + 64.0;
    const int n = std::max(256, static_cast<int>(std::ceil(band / 64.0)) * 64);

    std::vector<Eigen::Vector4d> feats(static_cast<std::size_t>(n));
    std::vector<double> h(static_cast<std::size_t>(n));
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        feats[i] << std::cos(t), std::sin(t), std::cos(2.0 * t), std::sin(2.0 * t);
        h[i] = lambda.dot(feats[i]);
        top = std::max(top, h[i]);
    }
    double total = 0.0;
    Eigen::Vector4d m = Eigen::Vector4d::Zero();
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(h[i] - top);
        total += w;
        m += w * feats[i];
        s += w * feats[i] * feats[i].transpose();
    }
    m /= total;
    s /= total;
    return {m, s - m * m.transpose()};
}

Eigen::Vector4d to_natural(double mu1, double mu2, double k1, double k2) {
    return {k1 * std::cos(mu1), k1 * std::sin(mu1), k2 * std::cos(2.0 * mu2), k2 * std::sin(2.0 * mu2)};
}

struct UserParams {
    double mu1, mu2, k1, k2;
};

UserParams from_natural(const Eigen::Vector4d& l) {
    return {std::atan2(l[1], l[0]), 0.5 * std::atan2(l[3], l[2]), std::hypot(l[0], l[1]), std::hypot(l[2], l[3])};
}

// Score in natural coordinates, mapped to (mu1, mu2, kappa1, kappa2).
std::array<double, 4> user_score(const UserParams& p, const Eigen::Vector4d& g) {
    const double c1 = std::cos(p.mu1), s1 = std::sin(p.mu1);
    const double c2 = std::cos(2.0 * p.mu2), s2 = std::sin(2.0 * p.mu2);
    return {
        p.k1 * (-g[0] * s1 + g[1] * c1),
        2.0 * p.k2 * (-g[2] * s2 + g[3] * c2),
        g[0] * c1 + g[1] * s1,
        g[2] * c2 + g[3] * s2,
    };
}

Eigen::Vector4d natural_gradient(const TrigSums& t, const NaturalMoments& mom) {
    return Eigen::Vector4d(t.c1, t.s1, t.c2, t.s2) - t.n * mom.mean;
}

double norm4(const std::array<double, 4>& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

// Inverse of the mean resultant length A(kappa) = I1(kappa) / I0(kappa).
double inverse_mean_resultant(double r) {
    if (r < 0.53) return 2.0 * r + r * r * r + 5.0 * std::pow(r, 5) / 6.0;
    if (r < 0.85) return -0.4 + 1.39 * r + 0.43 / (1.0 - r);
    return 1.0 / (r * r * r - 4.0 * r * r + 3.0 * r);
}

constexpr double kMinLogKappa = -12.0;
constexpr double kMaxLogKappa = 6.9;  // kappa ~ 1000

}  // namespace

Sample::Sample(std::vector<double> angles) : angles_(std::move(angles)) {
    for (auto& a : angles_) {
        if (!std::isfinite(a)) throw InvalidArgument("sample angles must be finite");
        a = reduce_two_pi(a);
    }
}

Sample Sample::concatenated(const Sample& other) const {
    std::vector<double> all(angles_);
    all.insert(all.end(), other.angles_.begin(), other.angles_.end());
    return Sample(std::move(all));
}

FixedNuisance FixedNuisance::for_shift_tests(double mu1, double kappa1, double kappa2) {
    FixedNuisance f;
    f.mu1 = mu1;
    f.mu2 = 0.0;
    f.kappa1 = kappa1;
    f.kappa2 = kappa2;
    return f;
}

FixedNuisance FixedNuisance::for_vm_test(double mu1, double mu2, double kappa1) {
    FixedNuisance f;
    f.mu1 = mu1;
    f.mu2 = mu2;
    f.kappa1 = kappa1;
    f.kappa2 = 0.0;
    return f;
}

CenteredTrigSums::CenteredTrigSums(const Sample& sample, double mu1) : n(sample.size()) {
    for (double t : sample.angles()) {
        const double d = t - mu1;
        cos1 += std::cos(d);
        cos2 += std::cos(2.0 * d);
        sin2 += std::sin(2.0 * d);
    }
}

ShiftLikelihood::ShiftLikelihood(const Sample& sample, const FixedNuisance& nuisance)
    : sums_(sample, nuisance.mu1),
      kappa1_(nuisance.kappa1),
      kappa2_(nuisance.kappa2),
      normalizer_(nuisance.kappa1, nuisance.kappa2) {}

double ShiftLikelihood::operator()(double delta_prime) const {
    const double n = static_cast<double>(sums_.n);
    const double shifted = std::cos(2.0 * delta_prime) * sums_.cos2 - std::sin(2.0 * delta_prime) * sums_.sin2;
    const double lin = kappa1_ * sums_.cos1 + kappa2_ * shifted;
    if (sums_.n == 0) return 0.0;
    return lin - n * (kLogTwoPi + normalizer_.log_value(delta_prime));
}

ConcentrationLikelihood::ConcentrationLikelihood(const Sample& sample, const FixedNuisance& nuisance)
    : sums_(sample, nuisance.mu1),
      kappa1_(nuisance.kappa1),
      delta0_(nuisance.delta0()),
      shifted_cos2_(0.0),
      log_i0_kappa1_(0.0) {
    require_positive(nuisance.kappa1, "kappa1");
    shifted_cos2_ = std::cos(2.0 * delta0_) * sums_.cos2 - std::sin(2.0 * delta0_) * sums_.sin2;
    log_i0_kappa1_ = log_bessel_i0(kappa1_);
}

double ConcentrationLikelihood::operator()(double kappa2_prime) const {
    if (!(kappa2_prime >= 0.0) || !std::isfinite(kappa2_prime))
        throw InvalidArgument("kappa2' must be finite and >= 0");
    if (sums_.n == 0) return 0.0;
    const double n = static_cast<double>(sums_.n);
    const double log_g0 =
        kappa2_prime == 0.0 ? log_i0_kappa1_ : GvMNormalizer(kappa1_, kappa2_prime).log_value(delta0_);
    return kappa1_ * sums_.cos1 + kappa2_prime * shifted_cos2_ - n * (kLogTwoPi + log_g0);
}

double loglik_delta(const Sample& sample, double delta_prime, const FixedNuisance& nuisance) {
    return ShiftLikelihood(sample, nuisance)(delta_prime);
}

double loglik_kappa2(const Sample& sample, double kappa2_prime, const FixedNuisance& nuisance) {
    return ConcentrationLikelihood(sample, nuisance)(kappa2_prime);
}

double gvm_log_likelihood(const Sample& sample, const GvMParams& p) {
    return loglik_from_sums(TrigSums(sample), p.mu1(), p.mu2(), p.kappa1(), p.kappa2());
}

std::array<double, 4> gvm_score(const Sample& sample, const GvMParams& p) {
    const TrigSums sums(sample);
    const UserParams up{p.mu1(), p.mu2(), p.kappa1(), p.kappa2()};
    const auto mom = natural_moments(to_natural(up.mu1, up.mu2, up.k1, up.k2));
    return user_score(up, natural_gradient(sums, mom));
}

MLEFit fit_mle(const Sample& sample, const FitOptions& options) {
    if (sample.size() < 4) throw InvalidArgument("fit_mle needs at least 4 observations");
    const TrigSums sums(sample);

    auto objective = [&](const std::array<double, 4>& x) {
        if (x[2] < kMinLogKappa || x[2] > kMaxLogKappa || x[3] < kMinLogKappa || x[3] > kMaxLogKappa)
            return -std::numeric_limits<double>::infinity();
        return loglik_from_sums(sums, x[0], x[1], std::exp(x[2]), std::exp(x[3]));
    };

    // Trigonometric-moment start.
    const double r1 = std::hypot(sums.c1, sums.s1) / sums.n;
    const double r2 = std::hypot(sums.c2, sums.s2) / sums.n;
    const double k1_0 = std::clamp(inverse_mean_resultant(std::min(r1, 0.99)), 0.05, 50.0);
    const double k2_0 = std::clamp(inverse_mean_resultant(std::min(r2, 0.99)), 0.05, 50.0);
    std::array<double, 4> start{std::atan2(sums.s1, sums.c1), 0.5 * std::atan2(sums.s2, sums.c2), std::log(k1_0),
                                std::log(k2_0)};

    // Nelder-Mead ascent (implemented as descent on -objective).
    constexpr int dim = 4;
    std::array<std::array<double, 4>, dim + 1> simplex;
    std::array<double, dim + 1> value;
    simplex[0] = start;
    for (int i = 0; i < dim; ++i) {
        simplex[i + 1] = start;
        simplex[i + 1][i] += (i < 2 ? 0.3 : 0.4);
    }
    for (int i = 0; i <= dim; ++i) value[i] = objective(simplex[i]);

    MLEFit fit{GvMParams(1.0, 1.0, 1.0, 1.0), 0.0, false, 0, 0.0, {}};
    int iter = 0;
    auto order = [&]() {
        std::array<int, dim + 1> idx;
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return value[a] > value[b]; });
        auto s2 = simplex;
        auto v2 = value;
        for (int i = 0; i <= dim; ++i) {
            simplex[i] = s2[idx[i]];
            value[i] = v2[idx[i]];
        }
    };
    order();
    fit.ascent_trace.push_back(value[0]);

    const int nm_cap = std::min(options.max_iterations, 4000);
    while (iter < nm_cap) {
        const double spread = value[0] - value[dim];
        double diameter = 0.0;
        for (int i = 1; i <= dim; ++i)
            for (int k = 0; k < dim; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[0][k]));
        if (spread <= 1e-11 * (1.0 + std::abs(value[0])) && diameter < 1e-7) break;
        ++iter;

        std::array<double, 4> centroid{};
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / dim;
        auto along = [&](double t) {
            std::array<double, 4> p;
            for (int k = 0; k < dim; ++k) p[k] = centroid[k] + t * (simplex[dim][k] - centroid[k]);
            return p;
        };
        const auto refl = along(-1.0);
        const double f_refl = objective(refl);
        if (f_refl > value[0]) {
            const auto exp_pt = along(-2.0);
            const double f_exp = objective(exp_pt);
            if (f_exp > f_refl) {
                simplex[dim] = exp_pt;
                value[dim] = f_exp;
            } else {
                simplex[dim] = refl;
                value[dim] = f_refl;
            }
        } else if (f_refl > value[dim - 1]) {
            simplex[dim] = refl;
            value[dim] = f_refl;
        } else {
            const bool outside = f_refl > value[dim];
            const auto con = along(outside ? -0.5 : 0.5);
            const double f_con = objective(con);
            if (f_con > std::max(f_refl, value[dim])) {
                simplex[dim] = con;
                value[dim] = f_con;
            } else {
                for (int i = 1; i <= dim; ++i) {
                    for (int k = 0; k < dim; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    value[i] = objective(simplex[i]);
                }
            }
        }
        order();
        fit.ascent_trace.push_back(value[0]);
    }

    // Newton refinement in natural coordinates.
    UserParams cur{simplex[0][0], simplex[0][1], std::exp(simplex[0][2]), std::exp(simplex[0][3])};
    double cur_value = value[0];
    Eigen::Vector4d lambda = to_natural(cur.mu1, cur.mu2, cur.k1, cur.k2);
    auto mom = natural_moments(lambda);
    Eigen::Vector4d grad = natural_gradient(sums, mom);
    double grad_norm = norm4(user_score(cur, grad));

    while (grad_norm > options.gradient_tolerance && iter < options.max_iterations) {
        ++iter;
        const Eigen::Matrix4d hess = sums.n * mom.cov;
        const Eigen::Vector4d step = hess.ldlt().solve(grad);
        if (!step.allFinite()) break;

        bool accepted = false;
        double t = 1.0;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const Eigen::Vector4d cand = lambda + t * step;
            const UserParams up = from_natural(cand);
            if (!(up.k1 > 0.0) || !(up.k2 > 0.0) || std::log(up.k1) > kMaxLogKappa || std::log(up.k2) > kMaxLogKappa)
                continue;
            const double v = loglik_from_sums(sums, up.mu1, up.mu2, up.k1, up.k2);
            const auto cand_mom = natural_moments(cand);
            const Eigen::Vector4d cand_grad = natural_gradient(sums, cand_mom);
            const double cand_norm = norm4(user_score(up, cand_grad));
            // Near the optimum the objective moves by less than its own
            // rounding; a shrinking score is then the acceptance signal.
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(cur_value));
            if (v > cur_value || (v >= cur_value - noise && cand_norm < grad_norm)) {
                lambda = cand;
                cur = up;
                cur_value = std::max(v, cur_value);
                mom = cand_mom;
                grad = cand_grad;
                grad_norm = cand_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        fit.ascent_trace.push_back(cur_value);
    }

    fit.params = GvMParams(cur.mu1, cur.mu2, cur.k1, cur.k2);
    fit.log_likelihood = loglik_from_sums(sums, cur.mu1, cur.mu2, cur.k1, cur.k2);
    fit.iterations = iter;
    fit.gradient_norm = grad_norm;
    fit.converged = grad_norm <= options.gradient_tolerance;
    return fit;
}

std::vector<double> point_influence(const Sample& sample, const GvMParams& fit) {
    const double log_g0 = log_gvm_norm_const(fit.delta(), fit.kappa1(), fit.kappa2());
    std::vector<double> out;
    out.reserve(sample.size());
    for (double t : sample.angles()) {
        const double lf = fit.kappa1() * std::cos(t - fit.mu1()) + fit.kappa2() * std::cos(2.0 * (t - fit.mu2())) -
                          kLogTwoPi - log_g0;
        out.push_back(-lf);
    }
    return out;
}

Sample trim_influential(const Sample& sample, const GvMParams& fit, double threshold) {
    const auto infl = point_influence(sample, fit);
    std::vector<double> kept;
    for (std::size_t i = 0; i < infl.size(); ++i)
        if (infl[i] <= threshold) kept.push_back(sample.angles()[i]);
    return Sample(std::move(kept));
}

}  // namespace gvm
