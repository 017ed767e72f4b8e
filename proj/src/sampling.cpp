#include "gvmbayes/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "gvmbayes/errors.hpp"

namespace gvm {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(base ^ index); }

MixtureVM2Prior::MixtureVM2Prior(double xi_, VM2Params comp1_, VM2Params comp2_)
    : xi(xi_), comp1(comp1_), comp2(comp2_) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw InvalidArgument("mixture weight xi must lie in [0, 1]");
}

MixtureVM2Prior MixtureVM2Prior::symmetric(double nu1, double nu2, double tau, double xi) {
    return MixtureVM2Prior(xi, VM2Params(nu1, tau), VM2Params(nu2, tau));
}

UniformPrior::UniformPrior(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw InvalidArgument("uniform prior needs finite lo < hi");
}

VonMisesSampler::VonMisesSampler(const VMParams& p) : mu_(p.mu()), kappa_(p.kappa()) {
    if (kappa_ < 1e-5) {
        s_ = 1.0 / kappa_ + kappa_;
    } else {
        const double r = 1.0 + std::sqrt(1.0 + 4.0 * kappa_ * kappa_);
        const double rho = (r - std::sqrt(2.0 * r)) / (2.0 * kappa_);
        s_ = (1.0 + rho * rho) / (2.0 * rho);
    }
}

double VonMisesSampler::operator()(Rng& rng) const {
    // Below 1e-8 the density is uniform to within 1e-8 relative.
    if (kappa_ < 1e-8) return kTwoPi * rng.uniform();
    double w;
    for (;;) {
        const double z = std::cos(kPi * rng.uniform());
        w = (1.0 + s_ * z) / (s_ + z);
        const double y = kappa_ * (s_ - w);
        const double v = rng.uniform_open();
        if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) break;
    }
    double theta = std::acos(std::clamp(w, -1.0, 1.0));
    if (rng.uniform() < 0.5) theta = -theta;
    return reduce_two_pi(theta + mu_);
}

GvMSampler::GvMSampler(const GvMParams& p) : params_(p), proposal_(VMParams(p.mu1(), p.kappa1())) {}

double GvMSampler::operator()(Rng& rng) {
    const double k2 = params_.kappa2();
    const double m2 = params_.mu2();
    for (long long i = 0; i < kMaxConsecutiveRejections; ++i) {
        const double theta = proposal_(rng);
        ++proposals_;
        const double log_accept = k2 * (std::cos(2.0 * (theta - m2)) - 1.0);
        if (std::log(rng.uniform_open()) < log_accept) {
            ++accepted_;
            return theta;
        }
    }
    throw IterationCap("GvM rejection sampler exceeded 1e7 consecutive rejections");
}

double sample_vm(const VMParams& p, Rng& rng) { return VonMisesSampler(p)(rng); }

double sample_vm2(const VM2Params& p, Rng& rng) {
    const double phi = VonMisesSampler(VMParams(2.0 * p.mu(), p.kappa()))(rng);
    return reduce_pi(0.5 * phi);
}

double sample_gvm(const GvMParams& p, Rng& rng) {
    GvMSampler sampler(p);
    return sampler(rng);
}

double sample_mixture_vm2(const MixtureVM2Prior& m, Rng& rng) {
    if (m.xi >= 1.0) return sample_vm2(m.comp1, rng);
    if (m.xi <= 0.0) return sample_vm2(m.comp2, rng);
    return rng.uniform() < m.xi ? sample_vm2(m.comp1, rng) : sample_vm2(m.comp2, rng);
}

double sample_uniform(const UniformPrior& u, Rng& rng) { return u.lo + (u.hi - u.lo) * rng.uniform(); }

std::vector<double> sample_vm_n(const VMParams& p, std::size_t n, Rng& rng) {
    VonMisesSampler sampler(p);
    std::vector<double> out(n);
    for (auto& x : out) x = sampler(rng);
    return out;
}

std::vector<double> sample_vm2_n(const VM2Params& p, std::size_t n, Rng& rng) {
    VonMisesSampler sampler(VMParams(2.0 * p.mu(), p.kappa()));
    std::vector<double> out(n);
    for (auto& x : out) x = reduce_pi(0.5 * sampler(rng));
    return out;
}

std::vector<double> sample_gvm_n(const GvMParams& p, std::size_t n, Rng& rng) {
    GvMSampler sampler(p);
    std::vector<double> out(n);
    for (auto& x : out) x = sampler(rng);
    return out;
}

}  // namespace gvm
