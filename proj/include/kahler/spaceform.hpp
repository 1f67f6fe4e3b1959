#pragma once

#include <optional>
#include <string>

#include "kahler/tensor.hpp"

namespace kahler {

enum class ChartModel { ProjectiveConformal };

// Coordinate model of a space form of dimension n and sectional curvature c.
//
// The only model is the conformal chart g_ij = delta_ij / sigma(x)^2 with
// sigma = 1 + (c/4)|x|^2, valid wherever sigma > 0. It is the stereographic
// chart of the sphere for c > 0, the Poincare ball for c < 0 and Euclidean
// space for c = 0.
//
// Curvature convention (used everywhere in the library):
//   R(d_i, d_j) d_k = R^h_{kij} d_h,   R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
// so a space form has R^h_{kij} = c (delta^h_i g_jk - delta^h_j g_ik) and
// g(R(u,v)v, u) / |u ^ v|^2 = c.
class SpaceFormChart {
public:
    SpaceFormChart(int n, double c, ChartModel model = ChartModel::ProjectiveConformal);

    int n() const { return n_; }
    double c() const { return c_; }
    ChartModel model() const { return model_; }

    // Constant curvature follows from the pointwise condition only when n >= 3 (Schur).
    bool schur_applies() const { return n_ >= 3; }

    double conformal_factor(const Vec& x) const;  // sigma(x)
    bool contains(const Vec& x) const;
    // Radius of the ball that point sampling draws base points from.
    double sampling_radius() const;

private:
    int n_;
    double c_;
    ChartModel model_;
};

struct MetricSample {
    Vec x;
    Mat g;
    Mat g_inv;
    Tensor3 gamma;    // gamma(k, i, j) = Gamma^k_{ij}
    Tensor4 riemann;  // riemann(h, k, i, j) = R^h_{kij}
};

// Analytic metric, Christoffel symbols and curvature. The curvature is built
// from the Christoffel symbols and their analytic derivatives, not from the
// constant-curvature closed form, so comparing the two is a real check.
MetricSample metric_at(const SpaceFormChart& chart, const Vec& x);

// Default finite-difference step for base-coordinate derivatives.
double default_base_step(const Vec& x);

// Christoffel symbols from central differences of g (one Richardson step).
// Throws DiagnosticError when the two difference levels disagree by more
// than 1e-6.
Tensor3 fd_christoffel_oracle(const SpaceFormChart& chart, const Vec& x,
                              std::optional<double> h = std::nullopt);

// R^h_{kij} from central differences of the analytic Christoffel symbols.
Tensor4 fd_curvature_oracle(const SpaceFormChart& chart, const Vec& x,
                            std::optional<double> h = std::nullopt);

// c (delta^h_i g_jk - delta^h_j g_ik) for the given metric.
Tensor4 constant_curvature_tensor(const Mat& g, double c);

double sectional_curvature(const SpaceFormChart& chart, const Vec& x, const Vec& u, const Vec& v);

}  // namespace kahler
