#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gvmbayes/bayes_tests.hpp"
#include "gvmbayes/inference.hpp"
#include "gvmbayes/study_harness.hpp"

namespace gvm {

// Structured output: one record per line, space-separated key=value pairs in
// a fixed order, reals printed with 17 significant digits so that parsing a
// printed record gives back the same values. Lists are comma-separated.
//
//   record=mle_fit mu1 mu2 kappa1 kappa2 delta log_likelihood converged
//                  iterations gradient_norm ascent_trace
//   record=bayes_factor kind b01 log_b01 mc_std_error s_used complement_draws
//                  evidence numerator_loglik denominator_log_integral prior_atom_masses
//   record=study_report case replicates per_sequence_means mean sd ci_lo ci_hi
//                  evidence wall_time all_b01

std::string to_record(const MLEFit& fit);
std::string to_record(const BayesFactorResult& bf);
std::string to_record(const StudyReport& report);

MLEFit parse_mle_fit(std::string_view line);
BayesFactorResult parse_bayes_factor(std::string_view line);
StudyReport parse_study_report(std::string_view line);

/// Human-readable layouts.
std::string format_fit_table(const MLEFit& fit);
std::string format_bf_table(const BayesFactorResult& bf);
/// Rows of case, 95% interval and evidence, as in the study summary table.
std::string format_study_table(const std::vector<StudyReport>& reports);

std::string evidence_label(Evidence e);

}  // namespace gvm
