#include "geometry_internal.hpp"

namespace kahler {

double NijenhuisBlocks::max_abs() const {
    return std::max({hh.max_abs(), hv.max_abs(), vv.max_abs(), off_block});
}

double max_difference(const NijenhuisBlocks& a, const NijenhuisBlocks& b) {
    return std::max({(a.hh - b.hh).max_abs(), (a.hv - b.hv).max_abs(), (a.vv - b.vv).max_abs(),
                     std::abs(a.off_block - b.off_block)});
}

NijenhuisBlocks nijenhuis_closed_form(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const PointState s = evaluate_point(cfg, pt);
    const int n = cfg.n();
    const CoefficientSet& cs = s.coeffs;
    const Mat& g = s.ms.g;
    const Mat& J2 = s.st.J2;
    const Vec& p = pt.p;
    const Tensor3 r0 = contracted_curvature(s.ms, p);

    // Integrability obstruction; with b1 at its integrable value this is -c.
    const double F = cs.A / (cs.lambda * cs.lambda * cs.lambda) *
                     (cs.b1 * cs.lambda * (cs.lambda + 2.0 * cs.t * cs.lambda_prime) + cs.A * cs.lambda_prime);

    // brace(k, i, j) = {F (delta^h_i g_jk - delta^h_j g_ik) + R^h_kij} p_h
    Tensor3 brace(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) brace(k, i, j) = F * (p(i) * g(j, k) - p(j) * g(i, k)) + r0(k, i, j);

    NijenhuisBlocks nb{Tensor3(n), Tensor3(n), Tensor3(n), 0.0};
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                nb.hh(k, i, j) = -brace(k, i, j);
                double hv = 0.0;
                double vv = 0.0;
                for (int l = 0; l < n; ++l)
                    for (int r = 0; r < n; ++r) {
                        // brace(l, i, r) = {F(delta^h_i g_rl - delta^h_r g_il) + R^h_lir} p_h
                        hv += J2(k, l) * J2(j, r) * brace(l, i, r);
                        // {F(delta^h_l g_rk - delta^h_r g_lk) + R^h_klr} p_h = brace(k, l, r)
                        vv += J2(i, r) * J2(j, l) * brace(k, l, r);
                    }
                nb.hv(k, i, j) = -hv;
                nb.vv(k, i, j) = -vv;
            }
    return nb;
}

NijenhuisBlocks nijenhuis_oracle(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int n = cfg.n();
    const int dim = 2 * n;
    const double step = h.value_or(default_bundle_step(pt));
    const Vec z = to_coordinates(pt);

    auto frame_fields = [&](const Vec& w) { return detail::frame_at(cfg, w); };
    auto j_fields = [&](const Vec& w) {
        const PointState s = evaluate_point(cfg, from_coordinates(w));
        return Mat(s.frame.basis_change * full_matrices(s.st).J);
    };
    auto stacked = [&](const Vec& w) {
        Mat both(dim, 2 * dim);
        both << frame_fields(w), j_fields(w);
        return detail::flatten(both);
    };

    const PointState s0 = evaluate_point(cfg, pt);
    const Mat B = s0.frame.basis_change;
    const Mat Binv = s0.frame.inverse();
    const Mat JB = B * full_matrices(s0.st).J;  // coordinate components of J E_a
    const Mat Jc = JB * Binv;                   // J on coordinate vectors

    // Fields 0..dim-1 are E_a, dim..2dim-1 are J E_a. deriv[u] holds the
    // derivative of every field along field u.
    Mat fields(dim, 2 * dim);
    fields << B, JB;
    std::vector<Mat> deriv(2 * dim);
    for (int u = 0; u < 2 * dim; ++u) {
        const auto d = detail::directional(stacked, z, fields.col(u), step, "nijenhuis_oracle");
        deriv[u] = Eigen::Map<const Mat>(d.data(), dim, 2 * dim);
    }
    auto bracket = [&](int u, int v) -> Vec { return deriv[u].col(v) - deriv[v].col(u); };

    NijenhuisBlocks nb{Tensor3(n), Tensor3(n), Tensor3(n), 0.0};
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            const Vec N = bracket(dim + a, dim + b) - Jc * bracket(dim + a, b) - Jc * bracket(a, dim + b) - bracket(a, b);
            const Vec f = Binv * N;
            for (int e = 0; e < dim; ++e) {
                const bool a_h = a < n, b_h = b < n, e_h = e < n;
                if (a_h && b_h && !e_h) {
                    nb.hh(e - n, a, b) = f(e);
                } else if (a_h && !b_h && e_h) {
                    nb.hv(e, a, b - n) = f(e);
                } else if (!a_h && !b_h && !e_h) {
                    nb.vv(e - n, a - n, b - n) = f(e);
                } else if (!a_h && b_h) {
                    // N(V, H) = -N(H, V); only its vertical part can leak.
                    const double mirror = e_h ? 0.0 : f(e);
                    nb.off_block = std::max(nb.off_block, std::abs(mirror));
                } else {
                    nb.off_block = std::max(nb.off_block, std::abs(f(e)));
                }
            }
        }
    return nb;
}

}  // namespace kahler
