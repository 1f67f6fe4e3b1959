#include "geometry_internal.hpp"
#include "kahler/errors.hpp"

namespace kahler {

CurvatureBlocks curvature_blocks(const GeometryConfig& cfg, const CotangentPoint& pt) {
    return curvature_blocks(evaluate_point(cfg, pt));
}

CurvatureBlocks curvature_blocks(const PointState& s) {
    const int n = static_cast<int>(s.pt.p.size());
    const CoefficientSet& cs = s.coeffs;
    const double k = cs.c / cs.A;
    const Mat& G1 = s.st.G1;
    const Mat& G2 = s.st.G2;
    const Mat& J1 = s.st.J1;
    const Mat& J2 = s.st.J2;
    const Vec& p = s.pt.p;
    const Vec& g0 = s.frame.g0;

    // D(i, j) = d/dp_i (lambda p_j) = lambda' g^{0i} p_j + lambda delta^i_j
    const Mat D = cs.lambda_prime * g0 * p.transpose() + cs.lambda * Mat::Identity(n, n);

    CurvatureBlocks kb{Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n), Tensor4(n)};
    for (int h = 0; h < n; ++h)
        for (int kk = 0; kk < n; ++kk)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    kb.hh_h(h, kk, i, j) = k * ((h == i ? G1(j, kk) : 0.0) - (h == j ? G1(i, kk) : 0.0));
                    kb.vv_v(h, kk, i, j) = k * ((h == i ? G2(j, kk) : 0.0) - (h == j ? G2(i, kk) : 0.0));
                    double hv = 0.0, vh = 0.0;
                    for (int t = 0; t < n; ++t) {
                        hv += G2(t, kk) * (J1(j, t) * J1(i, h) - J1(i, t) * J1(j, h));
                        vh += G1(t, kk) * (J2(j, t) * J2(i, h) - J2(i, t) * J2(j, h));
                    }
                    kb.hh_v(h, kk, i, j) = k * hv;
                    kb.vv_h(h, kk, i, j) = k * vh;
                    kb.vh_v(h, kk, i, j) = k * J1(kk, h) * D(i, j);
                    kb.vh_h(h, kk, i, j) = -k * J2(kk, h) * D(i, j);
                }
    return kb;
}

Tensor4 assemble_curvature(const CurvatureBlocks& kb) {
    const int n = kb.hh_h.extent();
    Tensor4 K(2 * n);
    for (int h = 0; h < n; ++h)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    K(h, k, i, j) = kb.hh_h(h, k, i, j);
                    K(n + h, n + k, i, j) = kb.hh_v(h, k, i, j);
                    K(h, k, n + i, n + j) = kb.vv_h(h, k, i, j);
                    K(n + h, n + k, n + i, n + j) = kb.vv_v(h, k, i, j);
                    K(n + h, k, n + i, j) = kb.vh_v(h, k, i, j);
                    K(h, n + k, n + i, j) = kb.vh_h(h, k, i, j);
                    K(n + h, k, j, n + i) = -kb.vh_v(h, k, i, j);
                    K(h, n + k, j, n + i) = -kb.vh_h(h, k, i, j);
                }
    return K;
}

Tensor4 curvature_oracle(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const PointState s = evaluate_point(cfg, pt);
    const Tensor3 conn = frame_connection(connection_coeffs(cfg, pt));
    const Tensor3 C = frame_brackets(s);

    const auto raw = detail::frame_derivatives(
        cfg, pt, [&](const Vec& w) { return frame_connection(connection_coeffs(cfg, from_coordinates(w))).data(); },
        step, "curvature_oracle");
    std::vector<Tensor3> dconn(dim, Tensor3(dim));  // dconn[a] = E_a(conn)
    for (int a = 0; a < dim; ++a) dconn[a].data() = raw[a];

    Tensor4 K(dim);
    for (int e = 0; e < dim; ++e)
        for (int c = 0; c < dim; ++c)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) {
                    double v = dconn[a](e, b, c) - dconn[b](e, a, c);
                    for (int d = 0; d < dim; ++d)
                        v += conn(d, b, c) * conn(e, a, d) - conn(d, a, c) * conn(e, b, d) - C(d, a, b) * conn(e, d, c);
                    K(e, c, a, b) = v;
                }
    return K;
}

double curvature_skew_residual(const Tensor4& K, const Mat& G) {
    const int dim = K.extent();
    // lowered(w, c, a, b) = G(K(E_a, E_b) E_c, E_w)
    Tensor4 lowered(dim);
    for (int w = 0; w < dim; ++w)
        for (int c = 0; c < dim; ++c)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) {
                    double v = 0.0;
                    for (int e = 0; e < dim; ++e) v += G(w, e) * K(e, c, a, b);
                    lowered(w, c, a, b) = v;
                }
    double worst = 0.0;
    for (int w = 0; w < dim; ++w)
        for (int c = 0; c < dim; ++c)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    worst = std::max(worst, std::abs(lowered(w, c, a, b) + lowered(c, w, a, b)));
    return worst;
}

RicciBlocks ricci_blocks(const CurvatureBlocks& kb, const StructureTensors& st) {
    const int n = static_cast<int>(st.G1.rows());
    const Tensor4 K = assemble_curvature(kb);
    RicciBlocks ric;
    ric.full = Mat::Zero(2 * n, 2 * n);
    // Ric(E_b, E_c) = trace(X -> K(X, E_b) E_c)
    for (int b = 0; b < 2 * n; ++b)
        for (int c = 0; c < 2 * n; ++c)
            for (int a = 0; a < 2 * n; ++a) ric.full(b, c) += K(a, c, a, b);
    ric.hh = ric.full.block(0, 0, n, n);
    ric.vv = ric.full.block(n, n, n, n);
    ric.mixed = ric.full.block(n, 0, n, n);
    return ric;
}

double einstein_residual(const RicciBlocks& ric, const StructureTensors& st, double einstein_constant) {
    const int n = static_cast<int>(st.G1.rows());
    const double hh = scaled_difference(ric.hh, Mat(einstein_constant * st.G1));
    const double vv = scaled_difference(ric.vv, Mat(einstein_constant * st.G2));
    const double mixed = std::max(max_abs(ric.mixed), max_abs(Mat(ric.full.block(0, n, n, n))));
    return std::max({hh, vv, mixed});
}

double nabla_K_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const Tensor4 K = assemble_curvature(curvature_blocks(cfg, pt));
    const Tensor3 conn = frame_connection(connection_coeffs(cfg, pt));
    const auto raw = detail::frame_derivatives(
        cfg, pt, [&](const Vec& w) { return assemble_curvature(curvature_blocks(cfg, from_coordinates(w))).data(); },
        step, "nabla_K_residual");

    double worst = 0.0;
    Tensor4 dK(dim);
    for (int w = 0; w < dim; ++w) {
        dK.data() = raw[w];
        for (int e = 0; e < dim; ++e)
            for (int c = 0; c < dim; ++c)
                for (int a = 0; a < dim; ++a)
                    for (int b = 0; b < dim; ++b) {
                        double v = dK(e, c, a, b);
                        for (int f = 0; f < dim; ++f) {
                            v += conn(e, w, f) * K(f, c, a, b) - conn(f, w, c) * K(e, f, a, b) -
                                 conn(f, w, a) * K(e, c, f, b) - conn(f, w, b) * K(e, c, a, f);
                        }
                        worst = std::max(worst, std::abs(v));
                    }
    }
    return worst;
}

HolomorphicCurvature::HolomorphicCurvature(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const PointState s = evaluate_point(cfg, pt);
    K_ = assemble_curvature(curvature_blocks(s));
    const FullMatrices fm = full_matrices(s.st);
    J_ = fm.J;
    G_ = fm.G;
}

double HolomorphicCurvature::operator()(const Vec& X) const {
    const int dim = K_.extent();
    if (X.size() != dim) throw RejectedInput("direction must have 2n adapted-frame components");
    const double norm2 = X.dot(G_ * X);
    if (!(std::sqrt(std::max(norm2, 0.0)) >= 1e-12)) throw RejectedInput("direction has vanishing G-norm");
    const Vec JX = J_ * X;
    Vec kx = Vec::Zero(dim);  // K(X, JX) JX
    for (int e = 0; e < dim; ++e)
        for (int c = 0; c < dim; ++c)
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) kx(e) += K_(e, c, a, b) * X(a) * JX(b) * JX(c);
    return X.dot(G_ * kx) / (norm2 * norm2);
}

double holomorphic_sectional_curvature(const GeometryConfig& cfg, const CotangentPoint& pt, const Vec& X) {
    return HolomorphicCurvature(cfg, pt)(X);
}

}  // namespace kahler
