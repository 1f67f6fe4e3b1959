#include "geometry_internal.hpp"
#include "kahler/errors.hpp"

namespace kahler {

namespace {

ConnectionCoeffs generic_from_state(const PointState& s, const CoefficientRates& rates) {
    const int n = static_cast<int>(s.pt.p.size());
    const CoefficientSet& cs = s.coeffs;
    const Mat& g = s.ms.g;
    const Mat& gi = s.ms.g_inv;
    const Vec& p = s.pt.p;
    const Vec& g0 = s.frame.g0;
    const Tensor3 r0 = contracted_curvature(s.ms, p);

    // Fibre derivatives, using d/dp_i t = g^{0i} and d/dp_i g^{0j} = g^{ij}.
    //   dG1(i, j, k) = d/dp_i G1_jk,   dG2(i, j, k) = d/dp_i G2^jk
    Tensor3 dG1(n), dG2(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                dG1(i, j, k) = rates.c1 * g0(i) * g(j, k) + rates.d1 * g0(i) * p(j) * p(k) +
                               cs.d1 * ((i == j ? p(k) : 0.0) + (i == k ? p(j) : 0.0));
                dG2(i, j, k) = rates.c2 * g0(i) * gi(j, k) + rates.d2 * g0(i) * g0(j) * g0(k) +
                               cs.d2 * (gi(i, j) * g0(k) + g0(j) * gi(i, k));
            }

    ConnectionCoeffs cc{Tensor3(n), Tensor3(n), Tensor3(n), s.ms.gamma};
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double q = 0.0, pv = 0.0, sv = 0.0;
                for (int k = 0; k < n; ++k) {
                    q += s.st.H2(h, k) * (dG2(i, j, k) + dG2(j, i, k) - dG2(k, i, j));
                    double curv = 0.0;
                    for (int l = 0; l < n; ++l) curv += s.st.G2(i, l) * r0(l, j, k);
                    pv += s.st.H1(h, k) * (dG1(i, j, k) - curv);
                    sv += s.st.H2(h, k) * dG1(k, i, j);
                }
                cc.Q(h, i, j) = 0.5 * q;
                cc.P(h, i, j) = 0.5 * pv;
                cc.S(h, i, j) = -0.5 * sv + 0.5 * r0(h, i, j);
            }
    return cc;
}

ConnectionCoeffs closed_from_state(const PointState& s) {
    const int n = static_cast<int>(s.pt.p.size());
    const CoefficientSet& cs = s.coeffs;
    const double lam = cs.lambda, dlam = cs.lambda_prime, t = cs.t, A = cs.A, c = cs.c;
    const Vec& p = s.pt.p;
    const Vec& g0 = s.frame.g0;
    const double growth = lam + 2.0 * t * dlam;

    const double q_j2 = (c * lam * lam * lam + A * A * dlam) / (A * lam * growth);
    const double q_delta = dlam / (lam * lam);
    const double q_radial = (lam * dlam - 3.0 * dlam * dlam) / (lam * growth);
    const double cl = c * lam / A;

    ConnectionCoeffs cc{Tensor3(n), Tensor3(n), Tensor3(n), s.ms.gamma};
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cc.Q(h, i, j) = q_j2 * s.st.J2(i, j) * p(h) +
                                q_delta * ((h == i ? g0(j) : 0.0) + (h == j ? g0(i) : 0.0)) +
                                q_radial * g0(i) * g0(j) * p(h);
                cc.P(h, i, j) = -cl * s.st.J2(h, i) * p(j);
                cc.S(h, i, j) = cl * s.st.J1(h, j) * p(i);
            }
    return cc;
}

}  // namespace

ConnectionCoeffs connection_generic(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const PointState s = evaluate_point(cfg, pt);
    return generic_from_state(s, coefficient_rates(cfg.family, cfg.c(), s.coeffs.t, cfg.perturbation));
}

ConnectionCoeffs connection_closed_form(const GeometryConfig& cfg, const CotangentPoint& pt) {
    return closed_from_state(evaluate_point(cfg, pt));
}

ConnectionCoeffs connection_coeffs(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const PointState s = evaluate_point(cfg, pt);
    ConnectionCoeffs cc = closed_from_state(s);
    cc.Q = generic_from_state(s, coefficient_rates(cfg.family, cfg.c(), s.coeffs.t, cfg.perturbation)).Q;
    return cc;
}

Tensor3 frame_connection(const ConnectionCoeffs& cc) {
    const int n = cc.Q.extent();
    Tensor3 conn(2 * n);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                conn(n + h, n + i, n + j) = cc.Q(h, i, j);          // nabla_{V^i} V^j
                conn(n + h, i, n + j) = -cc.gamma(j, i, h);         // nabla_{H_i} V^j
                conn(h, i, n + j) = cc.P(h, j, i);
                conn(h, n + i, j) = cc.P(h, i, j);                  // nabla_{V^i} H_j
                conn(h, i, j) = cc.gamma(h, i, j);                  // nabla_{H_i} H_j
                conn(n + h, i, j) = cc.S(h, i, j);
            }
    return conn;
}

Tensor3 koszul_oracle(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const PointState s = evaluate_point(cfg, pt);
    const Mat G = full_matrices(s.st).G;
    if (!(eigen_ratio(G) > 1e-12)) throw DiagnosticError("koszul_oracle: G is ill-conditioned at this point");
    const Mat Ginv = G.inverse();
    const Tensor3 C = frame_brackets(s);

    const auto raw = detail::frame_derivatives(
        cfg, pt, [&](const Vec& w) { return detail::flatten(full_matrices(evaluate_point(cfg, from_coordinates(w)).st).G); },
        step, "koszul_oracle");
    std::vector<Mat> dG;  // dG[a](b, c) = E_a(G_bc)
    for (const auto& d : raw) dG.emplace_back(Eigen::Map<const Mat>(d.data(), dim, dim));

    // L(d, a, b) = G(nabla_a E_b, E_d)
    Tensor3 conn(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            Vec lowered(dim);
            for (int d = 0; d < dim; ++d) {
                double v = dG[a](b, d) + dG[b](a, d) - dG[d](a, b);
                for (int f = 0; f < dim; ++f) v += C(f, a, b) * G(f, d) - C(f, a, d) * G(f, b) - C(f, b, d) * G(f, a);
                lowered(d) = 0.5 * v;
            }
            const Vec raised = Ginv * lowered;
            for (int c = 0; c < dim; ++c) conn(c, a, b) = raised(c);
        }
    return conn;
}

double torsion_residual(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const PointState s = evaluate_point(cfg, pt);
    const Tensor3 conn = frame_connection(connection_coeffs(cfg, pt));
    const Tensor3 C = frame_brackets(s);
    const int dim = conn.extent();
    double worst = 0.0;
    for (int c = 0; c < dim; ++c)
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                worst = std::max(worst, std::abs(conn(c, a, b) - conn(c, b, a) - C(c, a, b)));
    return worst;
}

double nabla_G_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const Mat G = full_matrices(evaluate_point(cfg, pt).st).G;
    const Tensor3 conn = frame_connection(connection_coeffs(cfg, pt));
    const auto raw = detail::frame_derivatives(
        cfg, pt, [&](const Vec& w) { return detail::flatten(full_matrices(evaluate_point(cfg, from_coordinates(w)).st).G); },
        step, "nabla_G_residual");

    double worst = 0.0;
    for (int w = 0; w < dim; ++w) {
        const Eigen::Map<const Mat> dG(raw[w].data(), dim, dim);
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) {
                double v = dG(b, c);
                for (int f = 0; f < dim; ++f) v -= conn(f, w, b) * G(f, c) + conn(f, w, c) * G(b, f);
                worst = std::max(worst, std::abs(v));
            }
    }
    return worst;
}

double nabla_J_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const Mat J = full_matrices(evaluate_point(cfg, pt).st).J;
    const Tensor3 conn = frame_connection(connection_coeffs(cfg, pt));
    const auto raw = detail::frame_derivatives(
        cfg, pt, [&](const Vec& w) { return detail::flatten(full_matrices(evaluate_point(cfg, from_coordinates(w)).st).J); },
        step, "nabla_J_residual");

    double worst = 0.0;
    for (int w = 0; w < dim; ++w) {
        const Eigen::Map<const Mat> dJ(raw[w].data(), dim, dim);
        for (int e = 0; e < dim; ++e)
            for (int c = 0; c < dim; ++c) {
                double v = dJ(e, c);
                for (int f = 0; f < dim; ++f) v += conn(e, w, f) * J(f, c) - conn(f, w, c) * J(e, f);
                worst = std::max(worst, std::abs(v));
            }
    }
    return worst;
}

}  // namespace kahler
