#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "harness_internal.hpp"
#include "kahler/errors.hpp"
#include "kahler/harness.hpp"

using namespace kahler;

namespace {

VerificationConfig inverse_sqrt_config(int points) {
    return parse_config("chart.n = 3\nchart.c = 1\nfamily.kind = inverse-sqrt\nfamily.B = 1\nA = 1\npoints = " +
                        std::to_string(points) + "\nt_max = 1\nseed = 17\n");
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const CheckResult& find(const CheckReport& r, const std::string& name) {
    auto it = std::find_if(r.checks.begin(), r.checks.end(), [&](const CheckResult& c) { return c.name == name; });
    REQUIRE(it != r.checks.end());
    return *it;
}

}  // namespace

TEST_CASE("config parsing") {
    const VerificationConfig cfg = parse_config(
        "# comment line\n"
        "chart.n = 2   # trailing comment\n"
        "chart.c=-1\n"
        "\n"
        "family.kind = power\n"
        "family.m = 2\n"
        "family.B = 0.5\n"
        "A = 2\n"
        "points = 7\n"
        "t_max = 3.5\n"
        "seed = 18446744073709551615\n"
        "h = 1e-4\n"
        "tolerance.einstein = 1e-8\n");
    CHECK(cfg.n == 2);
    CHECK(cfg.c == -1.0);
    CHECK(cfg.family.kind == "power");
    CHECK(*cfg.family.m == 2.0);
    CHECK(*cfg.family.B == 0.5);
    CHECK(cfg.A == 2.0);
    CHECK(cfg.points == 7);
    CHECK(cfg.t_max == 3.5);
    CHECK(cfg.seed == 18446744073709551615ull);
    CHECK(*cfg.h == 1e-4);
    CHECK(cfg.tolerances.at("einstein") == 1e-8);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("chart.k = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("chart.n\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("chart.n = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("chart.c = 1,5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("family.kind = spline\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("tolerance.nothing = 1\n"), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("points = 0\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("t_max = 0\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("chart.n = 1\n")), ConfigError);
    CHECK_THROWS_AS(validate(parse_config("A = -1\n")), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("later settings override earlier ones") {
    VerificationConfig cfg = parse_config("points = 3\npoints = 4\n");
    CHECK(cfg.points == 4);
    apply_setting(cfg, "points", "9");
    apply_setting(cfg, "family.kind", "inverse_sqrt");
    CHECK(cfg.points == 9);
    CHECK(cfg.family.kind == "inverse-sqrt");
}

TEST_CASE("table family from a file next to the config") {
    const auto dir = std::filesystem::temp_directory_path() / "kahler_table_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "lambda.txt") << "# t value slope\n0 1 1\n1, 2, 1\n2;3;1\n";
        std::ofstream(dir / "run.cfg") << "chart.c = -1\nfamily.kind = table\nfamily.table = lambda.txt\nt_max = 2\n";
    }
    const VerificationConfig cfg = load_config(dir / "run.cfg");
    const LambdaFamily f = make_family(cfg);
    CHECK(f(0.5).value == doctest::Approx(1.5));
    CHECK(f(1.5).first == doctest::Approx(1.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("rng is reproducible and well spread") {
    detail::Rng a(5, 1), b(5, 1), c(5, 2);
    double sum = 0.0, sq = 0.0;
    bool differs = false;
    for (int i = 0; i < 20000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        differs = differs || u != c.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double g = a.gaussian();
        b.gaussian();
        c.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(differs);
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
}

TEST_CASE("sampled points are admissible and t lies in the requested band") {
    for (const char* text : {"chart.c = 1\nfamily.kind = inverse-sqrt\npoints = 200\nt_max = 2\n",
                             "chart.c = -1\nfamily.kind = power\nfamily.m = 2\npoints = 200\nt_max = 1\n",
                             "chart.c = 0\npoints = 200\nt_max = 5\n"}) {
        const VerificationConfig cfg = parse_config(text);
        const GeometryConfig geo = make_geometry(cfg);
        const auto pts = sample_points(cfg);
        REQUIRE(pts.size() == 200);
        for (const CotangentPoint& pt : pts) {
            CHECK(pt.x.norm() <= geo.chart.sampling_radius());
            const double t = energy_density(metric_at(geo.chart, pt.x), pt.p);
            CHECK(t >= 0.05 * cfg.t_max * (1 - 1e-12));
            CHECK(t <= cfg.t_max * (1 + 1e-12));
        }
        const auto again = sample_points(cfg);
        CHECK((again.back().p - pts.back().p).norm() == 0.0);
    }
}

TEST_CASE("flat trivial suite") {
    const VerificationConfig cfg = parse_config("chart.n = 2\nchart.c = 0\nfamily.kind = constant\nA = 1\npoints = 10\n");
    const CheckReport r = run_suite(cfg);
    CHECK_FALSE(r.aborted);
    CHECK(r.overall_pass);
    for (const CheckResult& c : r.checks)
        if (c.counts) CHECK_MESSAGE(c.pass, c.name);
    CHECK(find(r, "hsc-nonconstancy").note.find("not applicable (flat)") != std::string::npos);
    CHECK(find(r, "hsc-nonconstancy").max_residual == 0.0);
    CHECK(find(r, "einstein").max_residual == 0.0);
    CHECK(r.einstein_constant == 0.0);
    CHECK_FALSE(r.warnings.empty());  // n = 2
}

TEST_CASE("sphere suite with the inverse square root family") {
    const CheckReport r = run_suite(inverse_sqrt_config(50));
    CHECK(r.overall_pass);
    CHECK(r.einstein_constant == 3.0);
    const auto& names = suite_checks();
    REQUIRE(r.checks.size() == names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        CHECK(r.checks[k].name == names[k].name);
        CHECK(r.checks[k].points == 50);
        if (r.checks[k].counts) CHECK_MESSAGE(r.checks[k].pass, r.checks[k].name);
    }
    CHECK(r.residuals.size() == 50 * names.size());
    for (const ResidualRecord& rec : r.residuals) CHECK(rec.residual >= 0.0);
    CHECK_FALSE(find(r, "q-closed-form-literal-match").counts);
    CHECK_FALSE(find(r, "q-closed-form-literal-match").pass);
}

TEST_CASE("literal checks count when asked") {
    VerificationConfig cfg = inverse_sqrt_config(3);
    cfg.include_literal = true;
    const CheckReport r = run_suite(cfg);
    CHECK(find(r, "q-closed-form-literal-match").counts);
    CHECK_FALSE(r.overall_pass);
}

TEST_CASE("tolerance overrides apply") {
    VerificationConfig cfg = inverse_sqrt_config(3);
    apply_setting(cfg, "tolerance.einstein", "1e-30");
    const CheckReport r = run_suite(cfg);
    CHECK(find(r, "einstein").tolerance == 1e-30);
}

TEST_CASE("perturbations are detected") {
    VerificationConfig cfg = inverse_sqrt_config(5);
    cfg.perturbation.d2_shift = 0.1;
    const CheckReport r = run_suite(cfg);
    CHECK_FALSE(r.overall_pass);
    CHECK(find(r, "local-symmetry").max_residual > 1e-3);
    CHECK(find(r, "einstein").max_residual > 1e-3);
    CHECK(find(r, "almost-complex").pass);
}

TEST_CASE("inadmissible family aborts with a structured report") {
    const VerificationConfig cfg = parse_config("chart.n = 3\nchart.c = 1\nfamily.kind = constant\nA = 1\nt_max = 1\n");
    const CheckReport r = run_suite(cfg);
    CHECK(r.aborted);
    CHECK_FALSE(r.overall_pass);
    CHECK(r.checks.empty());
    const std::string text = emit_report(r, ReportFormat::Text);
    CHECK(text.find("A^2 - 2ct*lambda^2 > 0") != std::string::npos);
    CHECK(text.find("t = 0.5") != std::string::npos);
    CHECK(emit_report(r, ReportFormat::Json).find("\"abort_reason\"") != std::string::npos);
}

TEST_CASE("report formats") {
    const CheckReport r = run_suite(inverse_sqrt_config(4));
    const std::string json = emit_report(r, ReportFormat::Json);
    CHECK(json.rfind("{\n  \"config\": {", 0) == 0);
    CHECK(json.find("\"overall_pass\": true") != std::string::npos);
    CHECK(json.find("\"runtime_ms\": null") != std::string::npos);
    CHECK(json.find("\"name\": \"einstein\",\n      \"paper_ref\":") != std::string::npos);
    CHECK(json == emit_report(run_suite(inverse_sqrt_config(4)), ReportFormat::Json));

    const std::string csv = emit_report(r, ReportFormat::CsvResiduals);
    CHECK(csv.rfind("x;p;t;check;residual\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 4 * suite_checks().size());

    const std::string text = emit_report(r, ReportFormat::Text);
    CHECK(text.find("overall: PASS") != std::string::npos);

    CHECK(parse_format("csv-residuals") == ReportFormat::CsvResiduals);
    CHECK_THROWS_AS(parse_format("yaml"), ConfigError);
}

TEST_CASE("thread count never changes the report") {
    VerificationConfig one = inverse_sqrt_config(6);
    VerificationConfig four = one;
    four.threads = 4;
    CHECK(emit_report(run_suite(one), ReportFormat::Json) == emit_report(run_suite(four), ReportFormat::Json));
    CHECK(emit_report(run_suite(one), ReportFormat::CsvResiduals) ==
          emit_report(run_suite(four), ReportFormat::CsvResiduals));
}

TEST_CASE("number formatting is locale independent and round trips") {
    CHECK(detail::format_double(0.1) == "0.1");
    CHECK(detail::format_double(-2.5e-12) == "-2.5e-12");
    CHECK(std::stod(detail::format_double(1.0 / 3.0)) == 1.0 / 3.0);
    Vec v(2);
    v << 1.5, -2.0;
    CHECK(detail::format_vector(v) == "1.5 -2");
}

TEST_CASE("holomorphic sectional curvature scan") {
    SUBCASE("flat") {
        const HscScan s = scan_hsc(parse_config("chart.c = 0\npoints = 3\n"), 10);
        CHECK(s.samples.size() == 30);
        for (const HscSample& h : s.samples) CHECK(h.value == 0.0);
        CHECK(s.spread == 0.0);
    }
    SUBCASE("sphere") {
        const HscScan s = scan_hsc(inverse_sqrt_config(2), 100);
        CHECK(s.spread > 1e-3);
        const std::string csv = emit_scan_csv(s);
        CHECK(count_lines(csv) == 1 + 200 + 3);
        CHECK(csv.find("\nspread;") != std::string::npos);
    }
    SUBCASE("inadmissible") {
        CHECK_THROWS_AS(scan_hsc(parse_config("chart.c = 1\nfamily.kind = constant\n"), 5), ConfigError);
    }
}
