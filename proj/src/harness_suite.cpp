#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "kahler/errors.hpp"
#include "kahler/harness.hpp"
#include "harness_internal.hpp"

namespace kahler {

const std::vector<CheckInfo>& suite_checks() {
    using C = Comparison;
    static const std::vector<CheckInfo> checks = {
        {"coefficient-identities", "a1 a2 = 1, (a1 + 2t b1)(a2 + 2t b2) = 1, G proportional to J", 1e-10, C::Below, false},
        {"metric-inverse", "G1 H1 = I, G2 H2 = I", 1e-10, C::Below, false},
        {"metric-positive", "G1, G2 positive definite (min eigenvalue ratio)", 1e-12, C::Above, false},
        {"base-curvature-skew", "R^0_kij = -R^0_kji", 1e-12, C::Below, false},
        {"horizontal-energy", "delta/delta q^k (t) = 0", 1e-8, C::Below, false},
        {"almost-complex", "J^2 = -I", 1e-10, C::Below, false},
        {"hermitian", "J^T G J = G", 1e-10, C::Below, false},
        {"fundamental-form", "phi(d/dp_i, delta_j) = lambda delta^i_j + mu g^0i p_j", 1e-11, C::Below, false},
        {"zero-section-scaling", "p = 0: J1 = (A/lambda(0)) g, J2 = (lambda(0)/A) g^-1", 1e-14, C::Below, false},
        {"nijenhuis-closed-form", "N = 0, closed-form blocks", 1e-9, C::Below, false},
        {"nijenhuis-oracle", "N = 0, bracket definition by finite differences", 1e-6, C::Below, false},
        {"closed-fundamental-form", "d phi = 0", 1e-7, C::Below, false},
        {"torsion", "nabla_X Y - nabla_Y X - [X, Y] = 0", 1e-10, C::Below, false},
        {"connection-closed-form", "P, S closed forms = fibre-derivative formulas", 1e-9, C::Below, false},
        {"connection-koszul", "connection = Koszul formula by finite differences", 1e-6, C::Below, false},
        {"metric-compatibility", "nabla G = 0", 1e-6, C::Below, false},
        {"parallel-complex-structure", "nabla J = 0", 1e-6, C::Below, false},
        {"curvature-oracle", "K closed form = nabla composition (relative)", 1e-5, C::Below, false},
        {"curvature-skew", "G(K(X,Y)Z, W) = -G(K(X,Y)W, Z)", 1e-9, C::Below, false},
        {"einstein", "Ric = (cn/A) G", 1e-9, C::Below, false},
        {"local-symmetry", "nabla K = 0", 1e-5, C::Below, false},
        {"hsc-nonconstancy", "holomorphic sectional curvature is not constant (relative spread)", 1e-3, C::Above, false},
        {"q-closed-form-literal-match", "literal Q closed form = fibre-derivative Q", 1e-9, C::Below, true},
        {"dphi-closed-form-literal", "mu != lambda': d phi = 1/2 (lambda' - mu) g^0h Dp_h ^ Dp_i ^ dq^i (relative)", 1e-6,
         C::Below, true},
    };
    return checks;
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ull);
    engine_.seed(splitmix64(s));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::gaussian() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
}

Vec Rng::gaussian_vector(int size) {
    Vec v(size);
    for (int i = 0; i < size; ++i) v(i) = gaussian();
    return v;
}

Vec Rng::unit_vector(int size) {
    Vec v = gaussian_vector(size);
    while (v.norm() < 1e-12) v = gaussian_vector(size);
    return v / v.norm();
}

double relative_spread(double lo, double hi) {
    const double scale = std::max(std::abs(lo), std::abs(hi));
    return scale == 0.0 ? 0.0 : (hi - lo) / scale;
}

}  // namespace detail

namespace {

constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kDirectionStream = 2;

void require_admissible_sample(const GeometryConfig& geo, const CotangentPoint& pt) {
    if (!geo.chart.contains(pt.x)) throw DiagnosticError("sampled x left the chart domain");
    const MetricSample ms = metric_at(geo.chart, pt.x);
    const double t = energy_density(ms, pt.p);
    const LambdaValue lv = geo.family(t);
    const double A = geo.A();
    if (!(lv.value > 0.0) || !(A * A - 2.0 * geo.c() * t * lv.value * lv.value > 0.0) ||
        !(lv.value + 2.0 * t * lv.first > 0.0))
        throw DiagnosticError("sampled point violates the admissibility conditions");
}

double dphi_literal_residual(const GeometryConfig& geo, const CotangentPoint& pt, std::optional<double> h) {
    GeometryConfig shifted = geo;
    if (shifted.perturbation.mu_shift == 0.0) shifted.perturbation.mu_shift = 1.0;
    const Tensor3 dphi = exterior_derivative_phi(shifted, pt, h);
    const Tensor3 expected = 0.5 * dphi_reference_form(shifted, pt);
    const double scale = expected.max_abs();
    if (scale == 0.0) throw DiagnosticError("reference 3-form vanishes at this point");
    return (dphi - expected).max_abs() / scale;
}

double zero_section_residual(const GeometryConfig& geo, const CotangentPoint& pt) {
    const MetricSample ms = metric_at(geo.chart, pt.x);
    const CoefficientSet cs = coefficients(geo.family, geo.c(), 0.0, geo.perturbation);
    const Vec zero = Vec::Zero(pt.p.size());
    const StructureTensors st = structure_tensors(cs, ms, {pt.x, zero});
    const double lambda0 = geo.family(0.0).value;
    const Mat J1 = (geo.A() / lambda0) * ms.g;
    const Mat J2 = (lambda0 / geo.A()) * ms.g_inv;
    return std::max(scaled_difference(st.J1, J1), scaled_difference(st.J2, J2));
}

double connection_closed_form_residual(const GeometryConfig& geo, const CotangentPoint& pt) {
    const ConnectionCoeffs closed = connection_closed_form(geo, pt);
    const ConnectionCoeffs generic = connection_generic(geo, pt);
    return std::max(scaled_difference(closed.P, generic.P), scaled_difference(closed.S, generic.S));
}

double q_literal_residual(const GeometryConfig& geo, const CotangentPoint& pt) {
    return scaled_difference(connection_closed_form(geo, pt).Q, connection_generic(geo, pt).Q);
}

double hsc_spread(const GeometryConfig& geo, const CotangentPoint& pt, int directions, detail::Rng& rng,
                  bool flat) {
    const HolomorphicCurvature H(geo, pt);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double largest = 0.0;
    for (int d = 0; d < directions; ++d) {
        const double v = H(rng.gaussian_vector(2 * geo.n()));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        largest = std::max(largest, std::abs(v));
    }
    return flat ? largest : detail::relative_spread(lo, hi);
}

struct PointOutcome {
    std::vector<double> residuals;
    std::vector<std::string> errors;
};

PointOutcome evaluate_checks(const VerificationConfig& cfg, const GeometryConfig& geo, const CotangentPoint& pt,
                             int index) {
    const auto& checks = suite_checks();
    PointOutcome out;
    out.residuals.assign(checks.size(), std::numeric_limits<double>::quiet_NaN());
    out.errors.resize(checks.size());
    const std::optional<double> h = cfg.h;
    const bool flat = geo.c() == 0.0;

    std::optional<PointState> state;
    std::optional<FullMatrices> full;
    std::optional<CurvatureBlocks> blocks;
    auto S = [&]() -> const PointState& {
        if (!state) state = evaluate_point(geo, pt);
        return *state;
    };
    auto F = [&]() -> const FullMatrices& {
        if (!full) full = full_matrices(S().st);
        return *full;
    };
    auto KB = [&]() -> const CurvatureBlocks& {
        if (!blocks) blocks = curvature_blocks(S());
        return *blocks;
    };

    for (std::size_t k = 0; k < checks.size(); ++k) {
        const std::string& name = checks[k].name;
        try {
            double r = 0.0;
            if (name == "coefficient-identities") {
                const CoefficientResiduals cr = coefficient_residuals(S().coeffs);
                r = std::max({cr.almost_complex, cr.proportionality, cr.kahler_closed_form});
            } else if (name == "metric-inverse") {
                const auto& st = S().st;
                const Mat I = Mat::Identity(geo.n(), geo.n());
                r = std::max(max_abs(Mat(st.G1 * st.H1 - I)), max_abs(Mat(st.G2 * st.H2 - I)));
            } else if (name == "metric-positive") {
                r = std::min(eigen_ratio(S().st.G1), eigen_ratio(S().st.G2));
            } else if (name == "base-curvature-skew") {
                const Tensor3 r0 = contracted_curvature(S().ms, pt.p);
                const Tensor4& R = S().ms.riemann;
                const int n = geo.n();
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j) {
                                r = std::max(r, std::abs(R(a, b, i, j) + R(a, b, j, i)));
                                if (a == 0) r = std::max(r, std::abs(r0(b, i, j) + r0(b, j, i)));
                            }
            } else if (name == "horizontal-energy") {
                const Vec d = frame_derivative_of_energy(geo, pt, h);
                r = scaled_residual(max_abs(Vec(d.head(geo.n()))), S().coeffs.t);
            } else if (name == "almost-complex") {
                const Mat& J = F().J;
                r = max_abs(Mat(J * J + Mat::Identity(J.rows(), J.cols())));
            } else if (name == "hermitian") {
                r = max_abs(Mat(F().J.transpose() * F().G * F().J - F().G));
            } else if (name == "fundamental-form") {
                const int n = geo.n();
                const Mat phi = fundamental_form(S().st);
                r = scaled_difference(Mat(phi.block(n, 0, n, n)), S().st.phi);
            } else if (name == "zero-section-scaling") {
                r = zero_section_residual(geo, pt);
            } else if (name == "nijenhuis-closed-form") {
                r = nijenhuis_closed_form(geo, pt).max_abs();
            } else if (name == "nijenhuis-oracle") {
                r = nijenhuis_oracle(geo, pt, h).max_abs();
            } else if (name == "closed-fundamental-form") {
                r = dphi_residual(geo, pt, h);
            } else if (name == "torsion") {
                r = torsion_residual(geo, pt);
            } else if (name == "connection-closed-form") {
                r = connection_closed_form_residual(geo, pt);
            } else if (name == "connection-koszul") {
                r = (frame_connection(connection_coeffs(geo, pt)) - koszul_oracle(geo, pt, h)).max_abs();
            } else if (name == "metric-compatibility") {
                r = nabla_G_residual(geo, pt, h);
            } else if (name == "parallel-complex-structure") {
                r = nabla_J_residual(geo, pt, h);
            } else if (name == "curvature-oracle") {
                r = scaled_difference(curvature_oracle(geo, pt, h), assemble_curvature(KB()));
            } else if (name == "curvature-skew") {
                r = curvature_skew_residual(assemble_curvature(KB()), F().G);
            } else if (name == "einstein") {
                r = einstein_residual(ricci_blocks(KB(), S().st), S().st, geo.c() * geo.n() / geo.A());
            } else if (name == "local-symmetry") {
                r = nabla_K_residual(geo, pt, h);
            } else if (name == "hsc-nonconstancy") {
                detail::Rng rng(cfg.seed, kDirectionStream + 16 * static_cast<std::uint64_t>(index));
                r = hsc_spread(geo, pt, cfg.hsc_directions, rng, flat);
            } else if (name == "q-closed-form-literal-match") {
                r = q_literal_residual(geo, pt);
            } else if (name == "dphi-closed-form-literal") {
                r = dphi_literal_residual(geo, pt, h);
            } else {
                throw DiagnosticError("no evaluator for check " + name);
            }
            out.residuals[k] = std::isfinite(r) ? r : std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(r)) out.errors[k] = "non-finite residual";
        } catch (const std::exception& e) {
            out.errors[k] = e.what();
        }
    }
    return out;
}

}  // namespace

std::vector<CotangentPoint> sample_points(const VerificationConfig& cfg) {
    const GeometryConfig geo = make_geometry(cfg);
    detail::Rng rng(cfg.seed, kSampleStream);
    const int n = cfg.n;
    const double radius = geo.chart.sampling_radius();
    std::vector<CotangentPoint> points;
    points.reserve(static_cast<std::size_t>(cfg.points));
    for (int k = 0; k < cfg.points; ++k) {
        CotangentPoint pt;
        pt.x = rng.unit_vector(n) * (radius * std::pow(rng.uniform(), 1.0 / n));
        const double t = cfg.t_max * (0.05 + 0.95 * rng.uniform());
        const Vec dir = rng.unit_vector(n);
        const MetricSample ms = metric_at(geo.chart, pt.x);
        const double norm2 = dir.dot(ms.g_inv * dir);
        pt.p = dir * std::sqrt(2.0 * t / norm2);
        require_admissible_sample(geo, pt);
        points.push_back(std::move(pt));
    }
    return points;
}

CheckReport run_suite(const VerificationConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    CheckReport report;
    report.config = cfg;
    const GeometryConfig geo = make_geometry(cfg);
    report.einstein_constant = cfg.c * cfg.n / cfg.A;
    if (cfg.n == 2)
        report.warnings.push_back("n = 2: the integrability argument for the base needs n >= 3; results reported as computed");
    if (cfg.perturbation.any())
        report.warnings.push_back("perturbation active: the structure is deliberately not Kahler-Einstein");

    report.admissibility = check_admissibility(geo.family, geo.c(), cfg.t_max, cfg.admissibility_samples);
    if (!report.admissibility.all_passed()) {
        const AdmissibilityCondition* f = report.admissibility.first_failure();
        report.aborted = true;
        report.abort_reason = "family not admissible: " + f->name + " fails at t = " +
                              detail::format_double(f->first_failure_t.value_or(0.0));
        report.overall_pass = false;
        report.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    const std::vector<CotangentPoint> points = sample_points(cfg);
    std::vector<PointOutcome> outcomes(points.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(cfg.threads == 0 ? hw : static_cast<unsigned>(cfg.threads), static_cast<unsigned>(points.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) outcomes[i] = evaluate_checks(cfg, geo, points[i], static_cast<int>(i));
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < points.size(); i = next++)
                    outcomes[i] = evaluate_checks(cfg, geo, points[i], static_cast<int>(i));
            });
        for (auto& th : pool) th.join();
    }

    const auto& checks = suite_checks();
    const bool flat = cfg.c == 0.0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const CheckInfo& info = checks[k];
        CheckResult res;
        res.name = info.name;
        res.paper_ref = info.paper_ref;
        res.points = static_cast<int>(points.size());
        res.comparison = info.comparison;
        res.tolerance = info.tolerance;
        res.counts = !info.literal || cfg.include_literal;
        if (info.name == "hsc-nonconstancy" && flat) {
            res.comparison = Comparison::Below;
            res.tolerance = 0.0;
            res.note = "not applicable (flat): H vanishes identically";
        }
        if (info.literal) res.note = "literal closed form; counts towards the verdict only with include_literal";
        if (auto it = cfg.tolerances.find(info.name); it != cfg.tolerances.end()) res.tolerance = it->second;

        bool failed = false;
        double worst = res.comparison == Comparison::Below ? 0.0 : std::numeric_limits<double>::infinity();
        for (const PointOutcome& o : outcomes) {
            const double v = o.residuals[k];
            if (!o.errors[k].empty() && res.error.empty()) res.error = o.errors[k];
            if (std::isnan(v)) {
                failed = true;
                continue;
            }
            worst = res.comparison == Comparison::Below ? std::max(worst, v) : std::min(worst, v);
        }
        if (failed) {
            res.max_residual = std::numeric_limits<double>::quiet_NaN();
            res.pass = false;
        } else {
            res.max_residual = worst;
            res.pass = res.comparison == Comparison::Below ? (worst < res.tolerance || worst == 0.0)
                                                           : worst > res.tolerance;
        }
        report.checks.push_back(std::move(res));
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const double t = energy_density(metric_at(geo.chart, points[i].x), points[i].p);
        for (std::size_t k = 0; k < checks.size(); ++k)
            report.residuals.push_back({points[i].x, points[i].p, t, checks[k].name, outcomes[i].residuals[k]});
    }

    report.overall_pass = true;
    for (const CheckResult& r : report.checks)
        if (r.counts && !r.pass) report.overall_pass = false;
    report.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

HscScan scan_hsc(const VerificationConfig& cfg, int directions) {
    if (directions < 1) throw ConfigError("directions must be >= 1");
    const GeometryConfig geo = make_geometry(cfg);
    const AdmissibilityReport adm = check_admissibility(geo.family, geo.c(), cfg.t_max, cfg.admissibility_samples);
    if (!adm.all_passed()) {
        const AdmissibilityCondition* f = adm.first_failure();
        throw ConfigError("family not admissible: " + f->name + " fails at t = " +
                          detail::format_double(f->first_failure_t.value_or(0.0)));
    }
    const std::vector<CotangentPoint> points = sample_points(cfg);
    HscScan scan;
    scan.min = std::numeric_limits<double>::infinity();
    scan.max = -scan.min;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const HolomorphicCurvature H(geo, points[i]);
        const double t = energy_density(metric_at(geo.chart, points[i].x), points[i].p);
        detail::Rng rng(cfg.seed, kDirectionStream + 16 * static_cast<std::uint64_t>(i));
        for (int d = 0; d < directions; ++d) {
            HscSample s;
            s.point = static_cast<int>(i);
            s.pt = points[i];
            s.t = t;
            s.direction = d;
            s.X = rng.gaussian_vector(2 * cfg.n);
            s.value = H(s.X);
            scan.min = std::min(scan.min, s.value);
            scan.max = std::max(scan.max, s.value);
            scan.samples.push_back(std::move(s));
        }
    }
    scan.spread = detail::relative_spread(scan.min, scan.max);
    return scan;
}

}  // namespace kahler
