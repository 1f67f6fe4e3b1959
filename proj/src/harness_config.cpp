#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kahler/errors.hpp"
#include "kahler/harness.hpp"

namespace kahler {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string context(std::string_view key, std::string_view value) {
    return std::string(key) + " = '" + std::string(value) + "'";
}

double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
        throw ConfigError("expected a finite number: " + context(key, value));
    return out;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
    Int out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer: " + context(key, value));
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("expected a boolean: " + context(key, value));
}

std::string canonical_kind(std::string_view kind) {
    if (kind == "constant") return "constant";
    if (kind == "power" || kind == "power-plus-constant") return "power";
    if (kind == "inverse-sqrt" || kind == "inverse_sqrt") return "inverse-sqrt";
    if (kind == "table") return "table";
    throw ConfigError("unknown family.kind '" + std::string(kind) +
                      "' (expected constant, power, inverse-sqrt or table)");
}

std::vector<LambdaNode> read_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open lambda table " + file.string());
    std::vector<LambdaNode> nodes;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), ';', ' ');
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        fields.imbue(std::locale::classic());
        LambdaNode node{};
        if (!(fields >> node.t >> node.value >> node.first))
            throw ConfigError("lambda table rows need 't value slope': " + line);
        nodes.push_back(node);
    }
    return nodes;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "chart.n", "chart.c", "family.kind", "family.m", "family.B", "family.table",
        "A", "points", "t_max", "seed", "h", "hsc.directions", "admissibility.samples",
        "perturb.b1_shift", "perturb.mu_shift", "perturb.d2_shift", "include_literal",
    };
    return keys;
}

void apply_setting(VerificationConfig& cfg, std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "chart.n") cfg.n = parse_integer<int>(key, value);
    else if (key == "chart.c") cfg.c = parse_double(key, value);
    else if (key == "family.kind") cfg.family.kind = canonical_kind(value);
    else if (key == "family.m") cfg.family.m = parse_double(key, value);
    else if (key == "family.B") cfg.family.B = parse_double(key, value);
    else if (key == "family.table") cfg.family.table = std::string(value);
    else if (key == "A") cfg.A = parse_double(key, value);
    else if (key == "points") cfg.points = parse_integer<int>(key, value);
    else if (key == "t_max") cfg.t_max = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "h") cfg.h = parse_double(key, value);
    else if (key == "hsc.directions") cfg.hsc_directions = parse_integer<int>(key, value);
    else if (key == "admissibility.samples") cfg.admissibility_samples = parse_integer<int>(key, value);
    else if (key == "perturb.b1_shift") cfg.perturbation.b1_shift = parse_double(key, value);
    else if (key == "perturb.mu_shift") cfg.perturbation.mu_shift = parse_double(key, value);
    else if (key == "perturb.d2_shift") cfg.perturbation.d2_shift = parse_double(key, value);
    else if (key == "include_literal") cfg.include_literal = parse_bool(key, value);
    else if (key == "threads") cfg.threads = parse_integer<int>(key, value);
    else if (key == "timings") cfg.timings = parse_bool(key, value);
    else if (key.substr(0, 10) == "tolerance.") {
        const std::string check(key.substr(10));
        const auto& checks = suite_checks();
        const bool known = std::any_of(checks.begin(), checks.end(),
                                       [&](const CheckInfo& ci) { return ci.name == check; });
        if (!known) throw ConfigError("tolerance override for unknown check '" + check + "'");
        cfg.tolerances[check] = parse_double(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

VerificationConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    VerificationConfig cfg;
    cfg.base_dir = base_dir;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        const std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        apply_setting(cfg, key, line.substr(eq + 1));
    }
    return cfg;
}

VerificationConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), file.parent_path());
}

void validate(const VerificationConfig& cfg) {
    if (cfg.n < 2) throw ConfigError("chart.n must be >= 2");
    if (cfg.points < 1) throw ConfigError("points must be >= 1");
    if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be > 0");
    if (!(cfg.A > 0.0)) throw ConfigError("A must be > 0");
    if (cfg.h && !(*cfg.h > 0.0)) throw ConfigError("h must be > 0");
    if (cfg.hsc_directions < 1) throw ConfigError("hsc.directions must be >= 1");
    if (cfg.admissibility_samples < 2) throw ConfigError("admissibility.samples must be >= 2");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
    if (cfg.family.kind == "table" && cfg.family.table.empty())
        throw ConfigError("family.kind = table needs family.table");
}

LambdaFamily make_family(const VerificationConfig& cfg) {
    const std::string& kind = cfg.family.kind;
    try {
        if (kind == "constant") return LambdaFamily::constant(cfg.A, cfg.family.B.value_or(1.0));
        if (kind == "power")
            return LambdaFamily::power_plus_constant(cfg.A, cfg.family.m.value_or(1.0), cfg.family.B.value_or(1.0));
        if (kind == "inverse-sqrt") return LambdaFamily::inverse_sqrt(cfg.A, cfg.c, cfg.family.B.value_or(1.0));
        if (kind == "table") {
            std::filesystem::path file = cfg.family.table;
            if (file.is_relative() && !cfg.base_dir.empty()) file = cfg.base_dir / file;
            return LambdaFamily::table(cfg.A, read_table(file));
        }
    } catch (const RejectedInput& e) {
        throw ConfigError(std::string("invalid lambda family: ") + e.what());
    }
    throw ConfigError("unknown family.kind '" + kind + "'");
}

GeometryConfig make_geometry(const VerificationConfig& cfg) {
    validate(cfg);
    try {
        return GeometryConfig{SpaceFormChart(cfg.n, cfg.c), make_family(cfg), cfg.perturbation};
    } catch (const RejectedInput& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace kahler
