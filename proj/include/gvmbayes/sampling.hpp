#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gvmbayes/circular.hpp"

namespace gvm {

/// SplitMix64 finalizer; used to derive well-separated stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the independent sub-stream `index` of a base seed:
/// splitmix64(base XOR index).
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

/// Seedable generator: a 64-bit Mersenne Twister with library-defined
/// conversions to uniforms, so streams are reproducible across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    /// Independent generator for sub-stream `index`.
    Rng split(std::uint64_t index) const { return Rng(stream_seed(seed_, index)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

struct MixtureVM2Prior {
    double xi;  // weight of comp1, in [0, 1]
    VM2Params comp1;
    VM2Params comp2;

    MixtureVM2Prior(double xi, VM2Params comp1, VM2Params comp2);
    /// xi vM2(nu1, tau) + (1 - xi) vM2(nu2, tau)
    static MixtureVM2Prior symmetric(double nu1, double nu2, double tau, double xi);
};

struct UniformPrior {
    double lo;
    double hi;

    UniformPrior(double lo, double hi);
};

/// Best-Fisher wrapped-Cauchy rejection sampler for vM(mu, kappa) with its
/// envelope constant precomputed. Draws are reduced onto [0, 2pi).
class VonMisesSampler {
public:
    explicit VonMisesSampler(const VMParams& p);
    double operator()(Rng& rng) const;

private:
    double mu_;
    double kappa_;
    double s_;
};

/// Rejection sampler for GvM: propose from vM(mu1, kappa1), accept with
/// probability exp(kappa2 [cos 2(theta - mu2) - 1]). Tracks proposal counts.
class GvMSampler {
public:
    static constexpr long long kMaxConsecutiveRejections = 10'000'000;

    explicit GvMSampler(const GvMParams& p);
    /// Throws IterationCap after 1e7 consecutive rejections.
    double operator()(Rng& rng);

    long long proposals() const { return proposals_; }
    long long accepted() const { return accepted_; }

private:
    GvMParams params_;
    VonMisesSampler proposal_;
    long long proposals_ = 0;
    long long accepted_ = 0;
};

double sample_vm(const VMParams& p, Rng& rng);
/// phi / 2 with phi ~ vM(2 mu, kappa), reduced onto [0, pi).
double sample_vm2(const VM2Params& p, Rng& rng);
double sample_gvm(const GvMParams& p, Rng& rng);
double sample_mixture_vm2(const MixtureVM2Prior& m, Rng& rng);
double sample_uniform(const UniformPrior& u, Rng& rng);

std::vector<double> sample_vm_n(const VMParams& p, std::size_t n, Rng& rng);
std::vector<double> sample_vm2_n(const VM2Params& p, std::size_t n, Rng& rng);
std::vector<double> sample_gvm_n(const GvMParams& p, std::size_t n, Rng& rng);

}  // namespace gvm
