#include "geometry_internal.hpp"

namespace kahler {

namespace {

Mat coordinate_phi(const PointState& s) {
    const Mat Binv = s.frame.inverse();
    return Binv.transpose() * fundamental_form(s.st) * Binv;
}

}  // namespace

Mat coordinate_fundamental_form(const GeometryConfig& cfg, const CotangentPoint& pt) {
    return coordinate_phi(evaluate_point(cfg, pt));
}

Tensor3 exterior_derivative_phi(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const int dim = 2 * cfg.n();
    const double step = h.value_or(default_bundle_step(pt));
    const Vec z = to_coordinates(pt);

    std::vector<Mat> dphi(dim);  // dphi[m] = d/dz^m of phi_coord
    for (int m = 0; m < dim; ++m) {
        const auto d = detail::directional(
            [&](const Vec& w) { return detail::flatten(coordinate_phi(evaluate_point(cfg, from_coordinates(w)))); }, z,
            Vec::Unit(dim, m), step, "exterior_derivative_phi");
        dphi[m] = Eigen::Map<const Mat>(d.data(), dim, dim);
    }
    Tensor3 out(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) out(a, b, c) = dphi[a](b, c) + dphi[b](c, a) + dphi[c](a, b);
    return out;
}

Tensor3 dphi_reference_form(const GeometryConfig& cfg, const CotangentPoint& pt) {
    const int n = cfg.n();
    const int dim = 2 * n;
    const PointState s = evaluate_point(cfg, pt);

    // Coordinate rows of the coframe: Dp_i = dp_i - gamma0_ij dq^j.
    Mat Dp = Mat::Zero(n, dim);
    Dp.block(0, 0, n, n) = -s.frame.gamma0;
    Dp.block(0, n, n, n) = Mat::Identity(n, n);
    const Eigen::RowVectorXd alpha = s.frame.g0.transpose() * Dp;  // g^{0h} Dp_h

    const double factor = s.coeffs.lambda_prime - s.coeffs.mu;
    Tensor3 out(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) {
                double v = 0.0;
                for (int i = 0; i < n; ++i) {
                    Eigen::Matrix3d m;
                    m << alpha(a), alpha(b), alpha(c), Dp(i, a), Dp(i, b), Dp(i, c), (a == i ? 1.0 : 0.0),
                        (b == i ? 1.0 : 0.0), (c == i ? 1.0 : 0.0);
                    v += m.determinant();
                }
                out(a, b, c) = factor * v;
            }
    return out;
}

double dphi_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    return exterior_derivative_phi(cfg, pt, h).max_abs();
}

}  // namespace kahler
