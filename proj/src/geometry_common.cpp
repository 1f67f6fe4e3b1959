#include "geometry_internal.hpp"
#include "kahler/errors.hpp"

namespace kahler {

PointState evaluate_point(const GeometryConfig& cfg, const CotangentPoint& pt) {
    PointState s;
    s.pt = pt;
    s.ms = metric_at(cfg.chart, pt.x);
    s.frame = adapted_frame(s.ms, pt);
    s.coeffs = coefficients(cfg.family, cfg.c(), energy_density(s.ms, pt.p), cfg.perturbation);
    s.st = structure_tensors(s.coeffs, s.ms, pt);
    return s;
}

Vec to_coordinates(const CotangentPoint& pt) {
    Vec z(pt.x.size() + pt.p.size());
    z << pt.x, pt.p;
    return z;
}

CotangentPoint from_coordinates(const Vec& z) {
    const auto n = z.size() / 2;
    return {z.head(n), z.tail(n)};
}

double default_bundle_step(const CotangentPoint& pt) { return 1e-4 * std::max(1.0, pt.p.norm()); }

Tensor3 contracted_curvature(const MetricSample& ms, const Vec& p) {
    const int n = static_cast<int>(p.size());
    Tensor3 r0(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = 0.0;
                for (int h = 0; h < n; ++h) v += p(h) * ms.riemann(h, k, i, j);
                r0(k, i, j) = v;
            }
    return r0;
}

Tensor3 frame_brackets(const PointState& s) {
    const int n = static_cast<int>(s.pt.p.size());
    Tensor3 C(2 * n);
    const Tensor3 r0 = contracted_curvature(s.ms, s.pt.p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                // [d/dp_i, delta_j] = Gamma^i_jk d/dp_k
                C(n + k, n + i, j) = s.ms.gamma(i, j, k);
                C(n + k, j, n + i) = -s.ms.gamma(i, j, k);
                // [delta_i, delta_j] = R^0_kij d/dp_k
                C(n + k, i, j) = r0(k, i, j);
            }
    return C;
}

Tensor3 coordinate_frame_brackets(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const double step = h.value_or(default_bundle_step(pt));
    const int dim = 2 * cfg.n();
    const Vec z = to_coordinates(pt);
    const Mat B = detail::frame_at(cfg, z);
    const Mat Binv = adapted_frame(metric_at(cfg.chart, pt.x), pt).inverse();

    // dB[a] = derivative of all frame columns along E_a
    std::vector<Mat> dB(dim);
    for (int a = 0; a < dim; ++a) {
        const auto d = detail::directional([&](const Vec& w) { return detail::flatten(detail::frame_at(cfg, w)); }, z,
                                           B.col(a), step, "coordinate_frame_brackets");
        dB[a] = Eigen::Map<const Mat>(d.data(), dim, dim);
    }
    Tensor3 C(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            const Vec coord = dB[a].col(b) - dB[b].col(a);
            const Vec frame = Binv * coord;
            for (int f = 0; f < dim; ++f) C(f, a, b) = frame(f);
        }
    return C;
}

Vec frame_derivative_of_energy(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h) {
    const double step = h.value_or(default_bundle_step(pt));
    const auto d = detail::frame_derivatives(
        cfg, pt,
        [&](const Vec& w) {
            const CotangentPoint q = from_coordinates(w);
            return std::vector<double>{energy_density(metric_at(cfg.chart, q.x), q.p)};
        },
        step, "frame_derivative_of_energy");
    Vec out(d.size());
    for (std::size_t a = 0; a < d.size(); ++a) out(static_cast<int>(a)) = d[a][0];
    return out;
}

}  // namespace kahler
