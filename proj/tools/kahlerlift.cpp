// Command-line front end: verify, scan-hsc, admissibility.
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "kahler/errors.hpp"
#include "kahler/harness.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
    std::string config;
    std::map<std::string, std::string> overrides;  // dotted key -> value
    std::vector<std::string> sets;                 // key=value
    int threads = 1;
    std::string output;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("config", args.config, "key=value configuration file")->required();
    for (const std::string& key : kahler::config_keys()) {
        if (key == "include_literal") continue;
        cmd->add_option_function<std::string>("--" + key, [&args, key](const std::string& v) { args.overrides[key] = v; },
                                               "override " + key);
    }
    cmd->add_option("--set", args.sets, "override any key, e.g. --set tolerance.einstein=1e-8");
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    cmd->add_option("-o,--output", args.output, "write to this file instead of stdout");
}

kahler::VerificationConfig resolve(const CommonArgs& args) {
    kahler::VerificationConfig cfg = kahler::load_config(args.config);
    for (const std::string& key : kahler::config_keys()) {
        auto it = args.overrides.find(key);
        if (it != args.overrides.end()) kahler::apply_setting(cfg, key, it->second);
    }
    for (const std::string& s : args.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw kahler::ConfigError("--set expects key=value, got '" + s + "'");
        kahler::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.threads = args.threads;
    kahler::validate(cfg);
    return cfg;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kahler::ConfigError("cannot write " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification of natural diagonal Kahler-Einstein structures on cotangent bundles of space forms"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    CommonArgs verify_args;
    std::string verify_format = "text";
    std::string residuals_path;
    bool include_literal = false;
    bool timings = false;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    add_common(verify, verify_args);
    verify->add_option("--format", verify_format, "json, text or csv-residuals");
    verify->add_option("--residuals", residuals_path, "also write per-point residuals (csv) here");
    verify->add_flag("--include-literal", include_literal, "count the literal closed-form checks in the verdict");
    verify->add_flag("--timings", timings, "report runtime (makes output run dependent)");

    CommonArgs scan_args;
    int directions = 100;
    auto* scan = app.add_subcommand("scan-hsc", "scan holomorphic sectional curvature over random directions");
    add_common(scan, scan_args);
    scan->add_option("--directions", directions, "directions per point")->required();

    CommonArgs adm_args;
    std::string adm_format = "text";
    auto* adm = app.add_subcommand("admissibility", "check the lambda family on [0, t_max]");
    add_common(adm, adm_args);
    adm->add_option("--format", adm_format, "json or text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (verify->parsed()) {
            kahler::VerificationConfig cfg = resolve(verify_args);
            if (include_literal) cfg.include_literal = true;
            cfg.timings = timings;
            const auto format = kahler::parse_format(verify_format);
            const kahler::CheckReport report = kahler::run_suite(cfg);
            write_output(verify_args.output, kahler::emit_report(report, format));
            if (!residuals_path.empty())
                write_output(residuals_path, kahler::emit_report(report, kahler::ReportFormat::CsvResiduals));
            if (report.aborted) {
                std::cerr << report.abort_reason << "\n";
                return kExitConfig;
            }
            return report.overall_pass ? kExitPass : kExitFail;
        }
        if (scan->parsed()) {
            const kahler::VerificationConfig cfg = resolve(scan_args);
            const kahler::HscScan result = kahler::scan_hsc(cfg, directions);
            write_output(scan_args.output, kahler::emit_scan_csv(result));
            return kExitPass;
        }
        if (adm->parsed()) {
            const kahler::VerificationConfig cfg = resolve(adm_args);
            const auto format = kahler::parse_format(adm_format);
            const kahler::GeometryConfig geo = kahler::make_geometry(cfg);
            const kahler::AdmissibilityReport report =
                kahler::check_admissibility(geo.family, geo.c(), cfg.t_max, cfg.admissibility_samples);
            write_output(adm_args.output, kahler::emit_admissibility(cfg, report, format));
            return report.all_passed() ? kExitPass : kExitConfig;
        }
    } catch (const kahler::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const kahler::RejectedInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitConfig;
}
