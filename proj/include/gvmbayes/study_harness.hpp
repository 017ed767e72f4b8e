#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/errors.hpp"

namespace gvm {

enum class CaseName { D1, D1prime, D2, S1, S2, S3, K2 };

std::string_view to_string(CaseName name);
/// Accepts the names above plus "D1'" for D1prime; throws UnknownCase.
CaseName parse_case_name(std::string_view text);
std::vector<CaseName> all_cases();

/// Each replicate draws delta from the test prior and sets mu2 = (mu1 - delta) mod pi.
struct PriorDrawDelta {};
/// Every replicate uses mu2 = (mu1 - value) mod pi.
struct FixedDelta {
    double value;
};
/// Replicates are drawn from vM(mu1, kappa1).
struct FixedVM {};

using Generator = std::variant<PriorDrawDelta, FixedDelta, FixedVM>;

struct CaseSpec {
    CaseName name;
    std::size_t n = 50;
    std::size_t r = 2000;
    std::size_t sequences = 3;
    std::size_t s = 2000;
    PriorSpec prior;
    PerturbationConfig cfg;
    Generator generator;
    FixedNuisance nuisance;
    std::uint64_t seed = 0;
    bool keep_raw = false;

    /// Throws InvalidArgument unless n >= 2, r >= 100, sequences >= 1, s >= 1000.
    void validate() const;
};

/// Desk-scale case definition (r = s = 2000); `full` switches to r = s = 1e4.
CaseSpec builtin_case(CaseName name, bool full = false);
CaseSpec builtin_case(std::string_view name, bool full = false);

struct StudyReport {
    CaseName name;
    std::size_t replicates = 0;
    std::vector<double> per_sequence_means;
    double mean = 0.0;
    double sd = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    Evidence evidence = Evidence::negative;
    double wall_time = 0.0;
    std::vector<double> all_b01;  // filled only with keep_raw
};

struct CiResult {
    double mean;
    double lo;
    double hi;
    double sd;
};

/// mean +- z_{(1+level)/2} sd / sqrt(N) over the pooled values (N >= 30).
CiResult aggregate_ci(const std::vector<double>& pool, double level = 0.95);

/// Bayes factor of replicate `index` of the case; replicates are independent
/// of each other and of the thread that runs them.
BayesFactorResult run_replicate(const CaseSpec& spec, std::size_t index);

struct RunOptions {
    unsigned threads = 1;
    /// Polled between replicates; when it becomes true the run stops.
    const std::atomic<bool>* stop = nullptr;
};

/// Raised when RunOptions::stop interrupts a run. Carries the b01 values of
/// the replicates completed before `next_index`, in replicate order.
class StudyInterrupted : public Error {
public:
    StudyInterrupted(std::size_t next_index, std::vector<double> completed)
        : Error("study interrupted at replicate " + std::to_string(next_index)),
          next_index_(next_index),
          completed_(std::move(completed)) {}

    std::size_t next_index() const { return next_index_; }
    const std::vector<double>& completed() const { return completed_; }

private:
    std::size_t next_index_;
    std::vector<double> completed_;
};

StudyReport run_case(const CaseSpec& spec, const RunOptions& options = {});

}  // namespace gvm
