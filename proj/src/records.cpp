#include "gvmbayes/records.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "gvmbayes/errors.hpp"

namespace gvm {
namespace {

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string reals(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += real(xs[i]);
    }
    return out;
}

class RecordWriter {
public:
    explicit RecordWriter(std::string_view type) { out_ = "record=" + std::string(type); }
    RecordWriter& add(std::string_view key, const std::string& value) {
        out_ += ' ';
        out_ += key;
        out_ += '=';
        out_ += value;
        return *this;
    }
    std::string str() const { return out_; }

private:
    std::string out_;
};

class RecordReader {
public:
    RecordReader(std::string_view line, std::string_view type) {
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r' || line[pos] == '\n'))
                ++pos;
            if (pos >= line.size()) break;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r' && line[end] != '\n')
                ++end;
            const auto token = line.substr(pos, end - pos);
            const auto eq = token.find('=');
            if (eq == std::string_view::npos) throw ParseError("record token without '=': " + std::string(token));
            fields_[std::string(token.substr(0, eq))] = std::string(token.substr(eq + 1));
            pos = end;
        }
        if (text("record") != type) throw ParseError("expected a " + std::string(type) + " record");
    }

    const std::string& text(const std::string& key) const {
        const auto it = fields_.find(key);
        if (it == fields_.end()) throw ParseError("record is missing '" + key + "'");
        return it->second;
    }

    double real(const std::string& key) const { return parse_real(text(key)); }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        const auto& s = text(key);
        std::size_t pos = 0;
        while (pos < s.size()) {
            auto end = s.find(',', pos);
            if (end == std::string::npos) end = s.size();
            out.push_back(parse_real(s.substr(pos, end - pos)));
            pos = end + 1;
        }
        return out;
    }

    long long integer(const std::string& key) const {
        const auto& s = text(key);
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer for '" + key + "'");
        return v;
    }

private:
    static double parse_real(const std::string& s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad real '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> fields_;
};

}  // namespace

std::string to_record(const MLEFit& fit) {
    const auto& p = fit.params;
    return RecordWriter("mle_fit")
        .add("mu1", real(p.mu1()))
        .add("mu2", real(p.mu2()))
        .add("kappa1", real(p.kappa1()))
        .add("kappa2", real(p.kappa2()))
        .add("delta", real(p.delta()))
        .add("log_likelihood", real(fit.log_likelihood))
        .add("converged", fit.converged ? "1" : "0")
        .add("iterations", std::to_string(fit.iterations))
        .add("gradient_norm", real(fit.gradient_norm))
        .add("ascent_trace", reals(fit.ascent_trace))
        .str();
}

std::string to_record(const BayesFactorResult& bf) {
    return RecordWriter("bayes_factor")
        .add("kind", std::string(to_string(bf.kind)))
        .add("b01", real(bf.b01))
        .add("log_b01", real(bf.log_b01))
        .add("mc_std_error", real(bf.mc_std_error))
        .add("s_used", std::to_string(bf.s_used))
        .add("complement_draws", std::to_string(bf.complement_draws))
        .add("evidence", std::string(to_string(bf.evidence)))
        .add("numerator_loglik", real(bf.numerator_loglik))
        .add("denominator_log_integral", real(bf.denominator_log_integral))
        .add("prior_atom_masses", reals(bf.prior_atom_masses))
        .str();
}

std::string to_record(const StudyReport& r) {
    return RecordWriter("study_report")
        .add("case", std::string(to_string(r.name)))
        .add("replicates", std::to_string(r.replicates))
        .add("per_sequence_means", reals(r.per_sequence_means))
        .add("mean", real(r.mean))
        .add("sd", real(r.sd))
        .add("ci_lo", real(r.ci_lo))
        .add("ci_hi", real(r.ci_hi))
        .add("evidence", std::string(to_string(r.evidence)))
        .add("wall_time", real(r.wall_time))
        .add("all_b01", reals(r.all_b01))
        .str();
}

MLEFit parse_mle_fit(std::string_view line) {
    const RecordReader in(line, "mle_fit");
    const auto conv = in.text("converged");
    if (conv != "0" && conv != "1") throw ParseError("converged must be 0 or 1");
    return MLEFit{GvMParams(in.real("mu1"), in.real("mu2"), in.real("kappa1"), in.real("kappa2")),
                  in.real("log_likelihood"),
                  conv == "1",
                  static_cast<int>(in.integer("iterations")),
                  in.real("gradient_norm"),
                  in.reals("ascent_trace")};
}

BayesFactorResult parse_bayes_factor(std::string_view line) {
    const RecordReader in(line, "bayes_factor");
    BayesFactorResult bf;
    bf.kind = parse_test_kind(in.text("kind"));
    bf.b01 = in.real("b01");
    bf.log_b01 = in.real("log_b01");
    bf.mc_std_error = in.real("mc_std_error");
    bf.s_used = static_cast<std::size_t>(in.integer("s_used"));
    bf.complement_draws = static_cast<std::size_t>(in.integer("complement_draws"));
    bf.evidence = parse_evidence(in.text("evidence"));
    bf.numerator_loglik = in.real("numerator_loglik");
    bf.denominator_log_integral = in.real("denominator_log_integral");
    bf.prior_atom_masses = in.reals("prior_atom_masses");
    return bf;
}

StudyReport parse_study_report(std::string_view line) {
    const RecordReader in(line, "study_report");
    StudyReport r;
    r.name = parse_case_name(in.text("case"));
    r.replicates = static_cast<std::size_t>(in.integer("replicates"));
    r.per_sequence_means = in.reals("per_sequence_means");
    r.mean = in.real("mean");
    r.sd = in.real("sd");
    r.ci_lo = in.real("ci_lo");
    r.ci_hi = in.real("ci_hi");
    r.evidence = parse_evidence(in.text("evidence"));
    r.wall_time = in.real("wall_time");
    r.all_b01 = in.reals("all_b01");
    return r;
}

std::string evidence_label(Evidence e) {
    if (e == Evidence::bare_mention) return "not worth more than a bare mention";
    return std::string(to_string(e));
}

std::string format_fit_table(const MLEFit& fit) {
    const auto& p = fit.params;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "mu1            %.6f\n"
                  "mu2            %.6f\n"
                  "kappa1         %.6f\n"
                  "kappa2         %.6f\n"
                  "delta          %.6f\n"
                  "log-likelihood %.6f\n"
                  "converged      %s (%d iterations, score norm %.3g)\n",
                  p.mu1(), p.mu2(), p.kappa1(), p.kappa2(), p.delta(), fit.log_likelihood,
                  fit.converged ? "yes" : "no", fit.iterations, fit.gradient_norm);
    return buf;
}

std::string format_bf_table(const BayesFactorResult& bf) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "test           %s\nB01            %.6g\nMC std error   %.3g\n",
                  std::string(to_string(bf.kind)).c_str(), bf.b01, bf.mc_std_error);
    out << buf;
    std::snprintf(buf, sizeof buf, "log B01        %.6f\n", bf.log_b01);
    out << buf;
    std::snprintf(buf, sizeof buf, "draws          %zu (%zu off the null set)\n", bf.s_used, bf.complement_draws);
    out << buf;
    if (!bf.prior_atom_masses.empty()) {
        out << "prior atoms   ";
        for (double m : bf.prior_atom_masses) {
            std::snprintf(buf, sizeof buf, " %.4f", m);
            out << buf;
        }
        out << '\n';
    }
    out << "evidence       " << evidence_label(bf.evidence) << '\n';
    return out.str();
}

std::string format_study_table(const std::vector<StudyReport>& reports) {
    std::ostringstream out;
    out << "Case      95% CI for mean B01     Evidence\n";
    char buf[256];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-8s  (%.3f, %.3f)%*s%s\n", std::string(to_string(r.name)).c_str(), r.ci_lo,
                      r.ci_hi, 8, "", evidence_label(r.evidence).c_str());
        out << buf;
    }
    return out.str();
}

}  // namespace gvm
