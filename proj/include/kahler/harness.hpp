#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kahler/geometry.hpp"
#include "kahler/params.hpp"

namespace kahler {

struct FamilySpec {
    std::string kind = "constant";  // constant | power | inverse-sqrt | table
    std::optional<double> m;
    std::optional<double> B;
    std::string table;  // node file for kind = table, resolved against base_dir
};

struct VerificationConfig {
    int n = 3;
    double c = 0.0;
    FamilySpec family;
    double A = 1.0;
    int points = 10;
    double t_max = 1.0;
    std::uint64_t seed = 1;
    std::optional<double> h;
    std::map<std::string, double> tolerances;  // keyed by check name
    int hsc_directions = 100;
    int admissibility_samples = 1001;
    Perturbation perturbation;
    bool include_literal = false;  // literal closed-form checks count towards the verdict

    // Execution settings; never echoed, never change report bytes.
    int threads = 1;  // 0 = hardware concurrency
    bool timings = false;
    std::filesystem::path base_dir;
};

// Flat key=value text, '#' starts a comment. Keys are dotted
// (chart.n, family.kind, tolerance.<check>, ...).
VerificationConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
VerificationConfig load_config(const std::filesystem::path& file);
void apply_setting(VerificationConfig& cfg, std::string_view key, std::string_view value);
// Every recognised key, in echo order (tolerance.* excluded).
const std::vector<std::string>& config_keys();
void validate(const VerificationConfig& cfg);

LambdaFamily make_family(const VerificationConfig& cfg);
GeometryConfig make_geometry(const VerificationConfig& cfg);

enum class Comparison { Below, Above };

struct CheckInfo {
    std::string name;
    std::string paper_ref;
    double tolerance;
    Comparison comparison;
    bool literal;  // excluded from the verdict unless include_literal
};
// The suite, in report order.
const std::vector<CheckInfo>& suite_checks();

struct CheckResult {
    std::string name;
    std::string paper_ref;
    int points = 0;
    double max_residual = 0.0;  // worst value: max for Below, min for Above; NaN after an error
    double tolerance = 0.0;
    Comparison comparison = Comparison::Below;
    bool pass = false;
    bool counts = true;  // part of overall_pass
    std::string note;
    std::string error;  // first diagnostic raised while evaluating
};

struct ResidualRecord {
    Vec x;
    Vec p;
    double t = 0.0;
    std::string check;
    double residual = 0.0;
};

struct CheckReport {
    VerificationConfig config;
    AdmissibilityReport admissibility;
    bool aborted = false;
    std::string abort_reason;
    std::vector<std::string> warnings;
    double einstein_constant = 0.0;
    std::vector<CheckResult> checks;
    std::vector<ResidualRecord> residuals;  // ordered by point, then check
    bool overall_pass = false;
    double runtime_ms = 0.0;
};

// Deterministic sample of admissible bundle points.
std::vector<CotangentPoint> sample_points(const VerificationConfig& cfg);

CheckReport run_suite(const VerificationConfig& cfg);

enum class ReportFormat { Json, Text, CsvResiduals };
ReportFormat parse_format(std::string_view tag);
std::string emit_report(const CheckReport& report, ReportFormat format);
std::string emit_admissibility(const VerificationConfig& cfg, const AdmissibilityReport& adm, ReportFormat format);

struct HscSample {
    int point = 0;
    CotangentPoint pt;
    double t = 0.0;
    int direction = 0;
    Vec X;
    double value = 0.0;
};

struct HscScan {
    std::vector<HscSample> samples;
    double min = 0.0;
    double max = 0.0;
    double spread = 0.0;  // (max - min) / max |H|, 0 when H vanishes
};

// Throws ConfigError when the family is not admissible.
HscScan scan_hsc(const VerificationConfig& cfg, int directions);
std::string emit_scan_csv(const HscScan& scan);

}  // namespace kahler
