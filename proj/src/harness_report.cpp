#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kahler/errors.hpp"
#include "kahler/harness.hpp"
#include "harness_internal.hpp"

namespace kahler {

namespace detail {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_vector(const Vec& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v(i));
    }
    return out;
}

}  // namespace detail

namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_json(const VerificationConfig& cfg) {
    Json j;
    j["chart.n"] = cfg.n;
    j["chart.c"] = cfg.c;
    j["family.kind"] = cfg.family.kind;
    j["family.m"] = optional_number(cfg.family.m);
    j["family.B"] = optional_number(cfg.family.B);
    j["family.table"] = cfg.family.table.empty() ? Json(nullptr) : Json(cfg.family.table);
    j["A"] = cfg.A;
    j["points"] = cfg.points;
    j["t_max"] = cfg.t_max;
    j["seed"] = cfg.seed;
    j["h"] = optional_number(cfg.h);
    j["hsc.directions"] = cfg.hsc_directions;
    j["admissibility.samples"] = cfg.admissibility_samples;
    j["perturb.b1_shift"] = cfg.perturbation.b1_shift;
    j["perturb.mu_shift"] = cfg.perturbation.mu_shift;
    j["perturb.d2_shift"] = cfg.perturbation.d2_shift;
    j["include_literal"] = cfg.include_literal;
    Json tol = Json::object();
    for (const auto& [name, value] : cfg.tolerances) tol[name] = value;
    j["tolerances"] = tol;
    return j;
}

Json admissibility_json(const AdmissibilityReport& adm) {
    Json j;
    j["passed"] = adm.all_passed();
    j["t_max"] = adm.t_max;
    j["samples"] = adm.samples;
    Json conds = Json::array();
    for (const AdmissibilityCondition& c : adm.conditions) {
        Json e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["first_failure_t"] = optional_number(c.first_failure_t);
        e["worst_value"] = number(c.worst_value);
        conds.push_back(std::move(e));
    }
    j["conditions"] = std::move(conds);
    return j;
}

std::string describe_family(const VerificationConfig& cfg) {
    std::string s = cfg.family.kind;
    if (cfg.family.kind == "power")
        s += "(m=" + detail::format_double(cfg.family.m.value_or(1.0)) +
             ", B=" + detail::format_double(cfg.family.B.value_or(1.0)) + ")";
    else if (cfg.family.kind == "table")
        s += "(" + cfg.family.table + ")";
    else
        s += "(B=" + detail::format_double(cfg.family.B.value_or(1.0)) + ")";
    return s;
}

std::string admissibility_text(const AdmissibilityReport& adm) {
    std::ostringstream out;
    if (adm.all_passed()) {
        out << "admissibility: all conditions hold on [0, " << detail::format_double(adm.t_max) << "] ("
            << adm.samples << " samples)\n";
    } else {
        const AdmissibilityCondition* f = adm.first_failure();
        out << "admissibility FAILED: " << f->name << " first fails at t = "
            << detail::format_double(f->first_failure_t.value_or(0.0)) << "\n";
    }
    for (const AdmissibilityCondition& c : adm.conditions) {
        out << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << "  min = " << detail::format_double(c.worst_value);
        if (c.first_failure_t) out << "  first failure t = " << detail::format_double(*c.first_failure_t);
        out << "\n";
    }
    return out.str();
}

std::string report_json(const CheckReport& r) {
    Json j;
    j["config"] = config_json(r.config);
    j["einstein_constant"] = number(r.einstein_constant);
    j["warnings"] = r.warnings;
    j["admissibility"] = admissibility_json(r.admissibility);
    if (r.aborted) j["abort_reason"] = r.abort_reason;
    Json checks = Json::array();
    for (const CheckResult& c : r.checks) {
        Json e;
        e["name"] = c.name;
        e["paper_ref"] = c.paper_ref;
        e["points"] = c.points;
        e["max_residual"] = number(c.max_residual);
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        e["comparison"] = c.comparison == Comparison::Below ? "below" : "above";
        e["counts_toward_verdict"] = c.counts;
        if (!c.note.empty()) e["note"] = c.note;
        if (!c.error.empty()) e["error"] = c.error;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["overall_pass"] = r.overall_pass;
    j["runtime_ms"] = r.config.timings ? number(r.runtime_ms) : Json(nullptr);
    return j.dump(2) + "\n";
}

std::string report_text(const CheckReport& r) {
    const VerificationConfig& cfg = r.config;
    std::ostringstream out;
    out << "n = " << cfg.n << ", c = " << detail::format_double(cfg.c) << ", A = " << detail::format_double(cfg.A)
        << ", lambda = " << describe_family(cfg) << ", points = " << cfg.points
        << ", t_max = " << detail::format_double(cfg.t_max) << ", seed = " << cfg.seed << "\n";
    for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
    if (r.aborted) {
        out << admissibility_text(r.admissibility);
        out << "aborted: " << r.abort_reason << "\n";
        out << "overall: FAIL\n";
        return out.str();
    }
    out << "Einstein constant cn/A = " << detail::format_double(r.einstein_constant) << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %6s %14s %12s  %s\n", "check", "points", "worst", "tolerance", "result");
    out << line;
    for (const CheckResult& c : r.checks) {
        const std::string bound = std::string(c.comparison == Comparison::Below ? "< " : "> ") +
                                  detail::format_double(c.tolerance);
        std::string verdict = c.pass ? "pass" : "FAIL";
        if (!c.counts) verdict += " (not counted)";
        std::snprintf(line, sizeof line, "%-30s %6d %14.3e %12s  %s\n", c.name.c_str(), c.points, c.max_residual,
                      bound.c_str(), verdict.c_str());
        out << line;
        if (!c.note.empty()) out << "    " << c.note << "\n";
        if (!c.error.empty()) out << "    error: " << c.error << "\n";
    }
    out << "\noverall: " << (r.overall_pass ? "PASS" : "FAIL") << "\n";
    if (cfg.timings) out << "runtime: " << detail::format_double(std::round(r.runtime_ms)) << " ms\n";
    return out.str();
}

std::string report_csv(const CheckReport& r) {
    std::string out = "x;p;t;check;residual\n";
    for (const ResidualRecord& rec : r.residuals) {
        out += detail::format_vector(rec.x);
        out += ';';
        out += detail::format_vector(rec.p);
        out += ';';
        out += detail::format_double(rec.t);
        out += ';';
        out += rec.check;
        out += ';';
        out += detail::format_double(rec.residual);
        out += '\n';
    }
    return out;
}

}  // namespace

ReportFormat parse_format(std::string_view tag) {
    if (tag == "json") return ReportFormat::Json;
    if (tag == "text") return ReportFormat::Text;
    if (tag == "csv-residuals") return ReportFormat::CsvResiduals;
    throw ConfigError("unknown report format '" + std::string(tag) + "' (expected json, text or csv-residuals)");
}

std::string emit_report(const CheckReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return report_json(report);
        case ReportFormat::Text: return report_text(report);
        case ReportFormat::CsvResiduals: return report_csv(report);
    }
    throw ConfigError("unknown report format");
}

std::string emit_admissibility(const VerificationConfig& cfg, const AdmissibilityReport& adm, ReportFormat format) {
    if (format == ReportFormat::Json) {
        Json j;
        j["config"] = config_json(cfg);
        j["admissibility"] = admissibility_json(adm);
        return j.dump(2) + "\n";
    }
    if (format == ReportFormat::Text) return admissibility_text(adm);
    throw ConfigError("admissibility reports are json or text");
}

std::string emit_scan_csv(const HscScan& scan) {
    std::string out = "kind;point;x;p;t;direction;X;H\n";
    for (const HscSample& s : scan.samples) {
        out += "sample;" + std::to_string(s.point) + ';' + detail::format_vector(s.pt.x) + ';' +
               detail::format_vector(s.pt.p) + ';' + detail::format_double(s.t) + ';' + std::to_string(s.direction) +
               ';' + detail::format_vector(s.X) + ';' + detail::format_double(s.value) + '\n';
    }
    out += "min;;;;;;;" + detail::format_double(scan.min) + '\n';
    out += "max;;;;;;;" + detail::format_double(scan.max) + '\n';
    out += "spread;;;;;;;" + detail::format_double(scan.spread) + '\n';
    return out;
}

}  // namespace kahler
