#include "kahler/spaceform.hpp"

#include <sstream>

#include "kahler/errors.hpp"
#include "kahler/numdiff.hpp"

namespace kahler {

namespace {

constexpr double kRichardsonLimit = 1e-6;

void require_inside(const SpaceFormChart& chart, const Vec& x) {
    if (x.size() != chart.n()) {
        throw RejectedInput("coordinate vector has length " + std::to_string(x.size()) +
                            ", chart dimension is " + std::to_string(chart.n()));
    }
    if (!chart.contains(x)) {
        std::ostringstream os;
        os << "point outside chart domain: 1 + (c/4)|x|^2 = " << chart.conformal_factor(x) << " <= 0";
        throw RejectedInput(os.str());
    }
}

std::vector<double> flatten(const Mat& m) { return {m.data(), m.data() + m.size()}; }

}  // namespace

SpaceFormChart::SpaceFormChart(int n, double c, ChartModel model) : n_(n), c_(c), model_(model) {
    if (n < 2) throw RejectedInput("space form dimension must be at least 2");
    if (!std::isfinite(c)) throw RejectedInput("sectional curvature must be finite");
}

double SpaceFormChart::conformal_factor(const Vec& x) const { return 1.0 + 0.25 * c_ * x.squaredNorm(); }

bool SpaceFormChart::contains(const Vec& x) const {
    return x.size() == n_ && x.allFinite() && conformal_factor(x) > 0.0;
}

double SpaceFormChart::sampling_radius() const {
    if (c_ > 0.0) return 1.0;
    if (c_ == 0.0) return 2.0;
    // Half of the Poincare-ball radius 2/sqrt(|c|), capped at 2.
    return std::min(2.0, 1.0 / std::sqrt(-c_));
}

MetricSample metric_at(const SpaceFormChart& chart, const Vec& x) {
    require_inside(chart, x);
    const int n = chart.n();
    const double c = chart.c();
    const double sigma = chart.conformal_factor(x);

    MetricSample ms;
    ms.x = x;
    ms.g = Mat::Identity(n, n) / (sigma * sigma);
    ms.g_inv = Mat::Identity(n, n) * (sigma * sigma);

    // g = exp(2 phi) delta with phi = -log(sigma).
    const Vec dphi = -0.5 * c * x / sigma;
    Mat ddphi = -0.5 * c / sigma * Mat::Identity(n, n) + (0.25 * c * c / (sigma * sigma)) * x * x.transpose();

    ms.gamma = Tensor3(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                ms.gamma(k, i, j) = (k == i ? dphi(j) : 0.0) + (k == j ? dphi(i) : 0.0) - (i == j ? dphi(k) : 0.0);

    // dgamma(m, k, i, j) = d_m Gamma^k_{ij}
    Tensor4 dgamma(n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dgamma(m, k, i, j) = (k == i ? ddphi(j, m) : 0.0) + (k == j ? ddphi(i, m) : 0.0) -
                                         (i == j ? ddphi(k, m) : 0.0);

    ms.riemann = Tensor4(n);
    for (int a = 0; a < n; ++a)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double r = dgamma(i, a, j, l) - dgamma(j, a, i, l);
                    for (int h = 0; h < n; ++h)
                        r += ms.gamma(a, i, h) * ms.gamma(h, j, l) - ms.gamma(a, j, h) * ms.gamma(h, i, l);
                    ms.riemann(a, l, i, j) = r;
                }
    return ms;
}

double default_base_step(const Vec& x) { return 1e-5 * std::max(1.0, x.norm()); }

Tensor3 fd_christoffel_oracle(const SpaceFormChart& chart, const Vec& x, std::optional<double> h) {
    require_inside(chart, x);
    const int n = chart.n();
    const double step = h.value_or(default_base_step(x));
    if (!(step > 0.0)) throw RejectedInput("finite-difference step must be positive");

    // dg(m)(i, j) = d_m g_ij
    std::vector<Mat> dg(n);
    for (int m = 0; m < n; ++m) {
        Vec dir = Vec::Zero(n);
        dir(m) = 1.0;
        if (!chart.contains(x + step * dir) || !chart.contains(x - step * dir))
            throw RejectedInput("finite-difference stencil leaves the chart domain");
        const Derivative d = richardson_derivative(
            [&](double s) { return flatten(metric_at(chart, x + s * dir).g); }, step);
        require_agreement(d, kRichardsonLimit, "fd_christoffel_oracle");
        dg[m] = Eigen::Map<const Mat>(d.value.data(), n, n);
    }

    const Mat g_inv = metric_at(chart, x).g_inv;
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma(k, i, j) = 0.5 * s;
            }
    return gamma;
}

Tensor4 fd_curvature_oracle(const SpaceFormChart& chart, const Vec& x, std::optional<double> h) {
    require_inside(chart, x);
    const int n = chart.n();
    const double step = h.value_or(default_base_step(x));

    // dgamma[m] = d_m Gamma, flattened in Tensor3 order.
    std::vector<Tensor3> dgamma(n, Tensor3(n));
    for (int m = 0; m < n; ++m) {
        Vec dir = Vec::Zero(n);
        dir(m) = 1.0;
        const Derivative d =
            richardson_derivative([&](double s) { return metric_at(chart, x + s * dir).gamma.data(); }, step);
        require_agreement(d, kRichardsonLimit, "fd_curvature_oracle");
        dgamma[m].data() = d.value;
    }
    const Tensor3 gamma = metric_at(chart, x).gamma;

    Tensor4 r(n);
    for (int a = 0; a < n; ++a)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = dgamma[i](a, j, l) - dgamma[j](a, i, l);
                    for (int k = 0; k < n; ++k) v += gamma(a, i, k) * gamma(k, j, l) - gamma(a, j, k) * gamma(k, i, l);
                    r(a, l, i, j) = v;
                }
    return r;
}

Tensor4 constant_curvature_tensor(const Mat& g, double c) {
    const int n = static_cast<int>(g.rows());
    Tensor4 r(n);
    for (int h = 0; h < n; ++h)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    r(h, k, i, j) = c * ((h == i ? g(j, k) : 0.0) - (h == j ? g(i, k) : 0.0));
    return r;
}

double sectional_curvature(const SpaceFormChart& chart, const Vec& x, const Vec& u, const Vec& v) {
    const MetricSample ms = metric_at(chart, x);
    const int n = chart.n();
    if (u.size() != n || v.size() != n) throw RejectedInput("tangent vectors must have the chart dimension");

    const double uu = u.dot(ms.g * u);
    const double vv = v.dot(ms.g * v);
    const double uv = u.dot(ms.g * v);
    const double area2 = uu * vv - uv * uv;
    if (!(area2 > 1e-14 * uu * vv) || !(area2 > 0.0))
        throw RejectedInput("degenerate plane: u and v are (numerically) linearly dependent");

    // g(R(u,v)v, u) = g_hm u^m R^h_{kij} v^k u^i v^j
    Vec ruvv = Vec::Zero(n);
    for (int h = 0; h < n; ++h)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) ruvv(h) += ms.riemann(h, k, i, j) * v(k) * u(i) * v(j);
    return u.dot(ms.g * ruvv) / area2;
}

}  // namespace kahler
