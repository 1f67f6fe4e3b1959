// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kahler/errors.hpp"
#include "kahler/harness.hpp"

using namespace kahler;

namespace {

struct Family {
    const char* label;
    VerificationConfig cfg;
};

VerificationConfig make(int n, double c, const char* kind, double A, int points, std::uint64_t seed) {
    VerificationConfig cfg;
    cfg.n = n;
    cfg.c = c;
    cfg.family.kind = kind;
    if (std::string(kind) == "power") cfg.family.m = 2.0;
    cfg.family.B = 1.0;
    cfg.A = A;
    cfg.points = points;
    cfg.t_max = 1.0;
    cfg.seed = seed;
    return cfg;
}

// The three named families: flat constant, power-plus-constant on the
// hyperbolic chart, inverse square root on the sphere chart.
std::vector<Family> named_families(int points) {
    return {
        {"flat constant", make(3, 0.0, "constant", 1.0, points, 101)},
        {"t^2+1, c=-1", make(3, -1.0, "power", 1.0, points, 102)},
        {"1/sqrt(2t+1), c=+1", make(3, 1.0, "inverse-sqrt", 1.0, points, 103)},
    };
}

struct Stat {
    double max = 0.0;
    double min = std::numeric_limits<double>::infinity();
    void add(double v) {
        max = std::max(max, v);
        min = std::min(min, v);
    }
};

// Runs f on every sampled point of cfg; exceptions become +inf residuals.
Stat over_points(const VerificationConfig& cfg, const std::function<double(const GeometryConfig&, const CotangentPoint&)>& f,
                 const Perturbation& pert = {}) {
    GeometryConfig geo = make_geometry(cfg);
    geo.perturbation = pert;
    Stat s;
    for (const CotangentPoint& pt : sample_points(cfg)) {
        try {
            s.add(f(geo, pt));
        } catch (const std::exception& e) {
            std::printf("    error at a sample point: %s\n", e.what());
            s.add(std::numeric_limits<double>::infinity());
        }
    }
    return s;
}

int failures = 0;

void detail_line(const std::string& what, double value, const char* cmp, double tol, bool ok) {
    std::printf("    %-66s %12.3e %s %-8.0e %s\n", what.c_str(), value, cmp, tol, ok ? "ok" : "FAIL");
}

bool below(const std::string& what, double value, double tol) {
    const bool ok = value < tol;
    detail_line(what, value, "<", tol, ok);
    return ok;
}

bool above(const std::string& what, double value, double tol) {
    const bool ok = value > tol;
    detail_line(what, value, ">", tol, ok);
    return ok;
}

void verdict(int id, const char* title, bool ok) {
    std::printf("criterion %d (%s): %s\n", id, title, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    if (!ok) ++failures;
}

void criterion1() {
    bool ok = true;
    for (const Family& f : named_families(100)) {
        const Stat s = over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) {
            const FullMatrices fm = full_matrices(evaluate_point(g, pt).st);
            return max_abs(Mat(fm.J * fm.J + Mat::Identity(fm.J.rows(), fm.J.cols())));
        });
        ok &= below(std::string(f.label) + ": max |J^2 + I|, 100 points", s.max, 1e-10);
    }
    verdict(1, "almost complex structure", ok);
}

void criterion2() {
    bool ok = true;
    Perturbation shifted;
    shifted.b1_shift = 0.1;
    for (const Family& f : named_families(50)) {
        const auto closed = [](const GeometryConfig& g, const CotangentPoint& pt) {
            return nijenhuis_closed_form(g, pt).max_abs();
        };
        const auto oracle = [](const GeometryConfig& g, const CotangentPoint& pt) {
            return nijenhuis_oracle(g, pt).max_abs();
        };
        const std::string l = f.label;
        ok &= below(l + ": closed-form N", over_points(f.cfg, closed).max, 1e-9);
        ok &= below(l + ": oracle N", over_points(f.cfg, oracle).max, 1e-6);
        ok &= above(l + ": closed-form N, b1 + 0.1 (min over points)", over_points(f.cfg, closed, shifted).min, 1e-3);
        ok &= above(l + ": oracle N, b1 + 0.1 (min over points)", over_points(f.cfg, oracle, shifted).min, 1e-3);
    }
    verdict(2, "integrability", ok);
}

void criterion3() {
    bool ok = true;
    Perturbation injected;
    injected.mu_shift = 1.0;
    for (const Family& f : named_families(50)) {
        const std::string l = f.label;
        const Stat herm = over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) {
            const FullMatrices fm = full_matrices(evaluate_point(g, pt).st);
            return max_abs(Mat(fm.J.transpose() * fm.G * fm.J - fm.G));
        });
        ok &= below(l + ": |J^T G J - G|", herm.max, 1e-10);
        const Stat dphi = over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) { return dphi_residual(g, pt); });
        ok &= below(l + ": |d phi|, mu = lambda'", dphi.max, 1e-7);

        // Closed form with the stated factor 1/2, relative mismatch.
        const Stat half = over_points(
            f.cfg,
            [](const GeometryConfig& g, const CotangentPoint& pt) {
                const Tensor3 expected = 0.5 * dphi_reference_form(g, pt);
                return (exterior_derivative_phi(g, pt) - expected).max_abs() / expected.max_abs();
            },
            injected);
        ok &= below(l + ": mu = lambda' + 1 vs 1/2 (lambda' - mu) form (rel)", half.max, 1e-6);
        // Same comparison without the factor 1/2, for information only.
        const Stat full = over_points(
            f.cfg,
            [](const GeometryConfig& g, const CotangentPoint& pt) {
                const Tensor3 expected = dphi_reference_form(g, pt);
                return (exterior_derivative_phi(g, pt) - expected).max_abs() / expected.max_abs();
            },
            injected);
        std::printf("    %-66s %12.3e (info)\n", (l + ": mu = lambda' + 1 vs (lambda' - mu) form (rel)").c_str(), full.max);
    }
    verdict(3, "Hermitian and Kahler", ok);
}

void criterion4() {
    bool ok = true;
    for (const Family& f : named_families(50)) {
        const std::string l = f.label;
        ok &= below(l + ": connection vs Koszul oracle",
                    over_points(f.cfg,
                                [](const GeometryConfig& g, const CotangentPoint& pt) {
                                    return (frame_connection(connection_coeffs(g, pt)) - koszul_oracle(g, pt)).max_abs();
                                })
                        .max,
                    1e-6);
        ok &= below(l + ": torsion",
                    over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) { return torsion_residual(g, pt); }).max,
                    1e-10);
        ok &= below(l + ": nabla G",
                    over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) { return nabla_G_residual(g, pt); }).max,
                    1e-6);
        ok &= below(l + ": nabla J",
                    over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) { return nabla_J_residual(g, pt); }).max,
                    1e-6);
    }
    verdict(4, "connection", ok);
}

void criterion5() {
    bool ok = true;
    for (const Family& f : named_families(50)) {
        const std::string l = f.label;
        ok &= below(l + ": curvature vs nabla composition (rel)",
                    over_points(f.cfg,
                                [](const GeometryConfig& g, const CotangentPoint& pt) {
                                    return scaled_difference(curvature_oracle(g, pt), assemble_curvature(curvature_blocks(g, pt)));
                                })
                        .max,
                    1e-5);
        if (f.cfg.c == 0.0) {
            const Stat zero = over_points(f.cfg, [](const GeometryConfig& g, const CotangentPoint& pt) {
                return assemble_curvature(curvature_blocks(g, pt)).max_abs();
            });
            const bool exact = zero.max == 0.0;
            detail_line(l + ": max |K| (must be exactly 0)", zero.max, "==", 0.0, exact);
            ok &= exact;
        }
    }
    verdict(5, "curvature", ok);
}

void criterion6() {
    bool ok = true;
    struct Case {
        int n;
        double c, A;
    };
    for (const Case& k : {Case{2, 1.0, 1.0}, Case{2, -1.0, 1.0}, Case{3, 1.0, 2.0}, Case{3, -1.0, 2.0}}) {
        const VerificationConfig cfg = make(k.n, k.c, k.c > 0 ? "inverse-sqrt" : "power", k.A, 50, 200 + k.n);
        const double constant = k.c * k.n / k.A;
        const Stat s = over_points(cfg, [constant](const GeometryConfig& g, const CotangentPoint& pt) {
            const PointState st = evaluate_point(g, pt);
            const RicciBlocks r = ricci_blocks(curvature_blocks(st), st.st);
            const FullMatrices fm = full_matrices(st.st);
            return max_abs(Mat(r.full - constant * fm.G));
        });
        char label[96];
        std::snprintf(label, sizeof label, "n=%d c=%+g A=%g: max |Ric - (cn/A) G|, cn/A = %g", k.n, k.c, k.A, constant);
        ok &= below(label, s.max, 1e-9);
    }
    verdict(6, "Einstein", ok);
}

void criterion7() {
    bool ok = true;
    Perturbation control;
    control.d2_shift = 0.1;
    const auto nk = [](const GeometryConfig& g, const CotangentPoint& pt) { return nabla_K_residual(g, pt); };
    for (const Family& f : named_families(20)) {
        const std::string l = f.label;
        ok &= below(l + ": max |nabla K|, 20 points", over_points(f.cfg, nk).max, 1e-5);
        if (f.cfg.c != 0.0)
            ok &= above(l + ": d2 + 0.1 control (min over points)", over_points(f.cfg, nk, control).min, 1e-3);
        else
            std::printf("    %-66s (info)\n", (l + ": no d2 control, closed-form K vanishes for every d2").c_str());
    }
    verdict(7, "local symmetry", ok);
}

void criterion8() {
    bool ok = true;
    for (const Family& f : named_families(20)) {
        VerificationConfig cfg = f.cfg;
        const HscScan scan = scan_hsc(cfg, 100);
        const std::string l = f.label;
        if (cfg.c == 0.0) {
            double largest = 0.0;
            for (const HscSample& s : scan.samples) largest = std::max(largest, std::abs(s.value));
            const bool exact = largest == 0.0;
            detail_line(l + ": max |H| (must be exactly 0)", largest, "==", 0.0, exact);
            ok &= exact;
            continue;
        }
        // relative spread at each fixed point, 100 directions
        double worst = std::numeric_limits<double>::infinity();
        for (int p = 0; p < cfg.points; ++p) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const HscSample& s : scan.samples)
                if (s.point == p) {
                    lo = std::min(lo, s.value);
                    hi = std::max(hi, s.value);
                }
            worst = std::min(worst, (hi - lo) / std::max(std::abs(lo), std::abs(hi)));
        }
        ok &= above(l + ": min over points of relative H spread", worst, 1e-3);
    }
    verdict(8, "holomorphic sectional curvature not constant", ok);
}

void criterion9() {
    bool ok = true;
    for (const Family& f : named_families(10)) {
        VerificationConfig a = f.cfg;
        VerificationConfig b = f.cfg;
        b.threads = 3;
        const std::string ja = emit_report(run_suite(a), ReportFormat::Json);
        const std::string jb = emit_report(run_suite(a), ReportFormat::Json);
        const std::string jc = emit_report(run_suite(b), ReportFormat::Json);
        const bool same = ja == jb && ja == jc;
        std::printf("    %-66s %12zu bytes %s\n", (std::string(f.label) + ": json reports byte-identical").c_str(), ja.size(),
                    same ? "ok" : "FAIL");
        ok &= same;
    }
    verdict(9, "determinism", ok);
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<void (*)()> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                              criterion6, criterion7, criterion8, criterion9};
    for (auto run : criteria) {
        try {
            run();
        } catch (const std::exception& e) {
            std::printf("criterion aborted: %s\n", e.what());
            ++failures;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("\n%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), secs);
    return failures == 0 ? 0 : 1;
}
