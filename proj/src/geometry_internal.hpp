#pragma once

#include <functional>
#include <vector>

#include "kahler/geometry.hpp"
#include "kahler/numdiff.hpp"

namespace kahler::detail {

// Richardson disagreement limit for bundle-level finite differences.
inline constexpr double kBundleRichardsonLimit = 1e-5;

inline std::vector<double> flatten(const Mat& m) { return {m.data(), m.data() + m.size()}; }
inline std::vector<double> flatten(const Vec& v) { return {v.data(), v.data() + v.size()}; }

// Coordinate components of the adapted frame at z (columns).
inline Mat frame_at(const GeometryConfig& cfg, const Vec& z) {
    const CotangentPoint pt = from_coordinates(z);
    return adapted_frame(metric_at(cfg.chart, pt.x), pt).basis_change;
}

// Derivative of f along the straight coordinate line z + s * direction.
inline std::vector<double> directional(const std::function<std::vector<double>(const Vec&)>& f, const Vec& z,
                                       const Vec& direction, double h, const char* what) {
    const Derivative d = richardson_derivative([&](double s) { return f(z + s * direction); }, h);
    require_agreement(d, kBundleRichardsonLimit, what);
    return d.value;
}

// Frame derivatives E_a(f) for all 2n frame vectors at pt.
inline std::vector<std::vector<double>> frame_derivatives(const GeometryConfig& cfg, const CotangentPoint& pt,
                                                          const std::function<std::vector<double>(const Vec&)>& f,
                                                          double h, const char* what) {
    const Vec z = to_coordinates(pt);
    const Mat B = frame_at(cfg, z);
    std::vector<std::vector<double>> out;
    out.reserve(B.cols());
    for (int a = 0; a < B.cols(); ++a) out.push_back(directional(f, z, B.col(a), h, what));
    return out;
}

}  // namespace kahler::detail
