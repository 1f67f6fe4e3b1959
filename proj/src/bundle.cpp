#include "kahler/bundle.hpp"

#include <sstream>

#include "kahler/errors.hpp"

namespace kahler {

double energy_density(const MetricSample& ms, const Vec& p) {
    if (p.size() != ms.g_inv.rows()) throw RejectedInput("covector dimension does not match the base dimension");
    return 0.5 * p.dot(ms.g_inv * p);
}

Mat AdaptedFrame::inverse() const {
    const int n = static_cast<int>(gamma0.rows());
    Mat inv = Mat::Identity(2 * n, 2 * n);
    inv.block(n, 0, n, n) = -gamma0.transpose();
    return inv;
}

AdaptedFrame adapted_frame(const MetricSample& ms, const CotangentPoint& pt) {
    const int n = static_cast<int>(ms.g.rows());
    if (pt.p.size() != n) throw RejectedInput("covector length does not match chart dimension");
    AdaptedFrame f;
    f.gamma0 = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int h = 0; h < n; ++h)
            for (int k = 0; k < n; ++k) f.gamma0(i, h) += pt.p(k) * ms.gamma(k, i, h);
    f.g0 = ms.g_inv * pt.p;

    // delta/delta q^i has d/dq^i component 1 and d/dp_h component gamma0(i, h).
    f.basis_change = Mat::Identity(2 * n, 2 * n);
    f.basis_change.block(n, 0, n, n) = f.gamma0.transpose();
    return f;
}

double eigen_ratio(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (largest == 0.0) return 0.0;
    return ev.minCoeff() / largest;
}

StructureTensors structure_tensors(const CoefficientSet& cs, const MetricSample& ms, const CotangentPoint& pt) {
    const double t = energy_density(ms, pt.p);
    if (std::abs(t - cs.t) > 1e-12 * std::max(1.0, t)) {
        std::ostringstream os;
        os.precision(17);
        os << "coefficient set was evaluated at t = " << cs.t << " but the point has t = " << t;
        throw RejectedInput(os.str());
    }
    const Mat& g = ms.g;
    const Mat& gi = ms.g_inv;
    const Vec& p = pt.p;
    const Vec g0 = gi * p;
    const Mat pp = p * p.transpose();
    const Mat g0g0 = g0 * g0.transpose();

    StructureTensors st;
    st.t = cs.t;
    st.J1 = cs.a1 * g + cs.b1 * pp;
    st.J2 = cs.a2 * gi + cs.b2 * g0g0;
    st.G1 = cs.c1 * g + cs.d1 * pp;
    st.G2 = cs.c2 * gi + cs.d2 * g0g0;
    st.H1 = gi / cs.c1 - cs.d1 / (cs.c1 * (cs.c1 + 2.0 * t * cs.d1)) * g0g0;
    st.H2 = g / cs.c2 - cs.d2 / (cs.c2 * (cs.c2 + 2.0 * t * cs.d2)) * pp;
    st.phi = cs.lambda * Mat::Identity(g.rows(), g.cols()) + cs.mu * g0 * p.transpose();

    constexpr double kRatio = 1e-12;
    if (!(eigen_ratio(st.G1) > kRatio)) throw InadmissiblePointError("G1 is not positive definite at this point");
    if (!(eigen_ratio(st.G2) > kRatio)) throw InadmissiblePointError("G2 is not positive definite at this point");
    return st;
}

FullMatrices full_matrices(const StructureTensors& st) {
    const int n = static_cast<int>(st.J1.rows());
    FullMatrices fm;
    fm.J = Mat::Zero(2 * n, 2 * n);
    fm.J.block(0, n, n, n) = -st.J2.transpose();
    fm.J.block(n, 0, n, n) = st.J1.transpose();
    fm.G = Mat::Zero(2 * n, 2 * n);
    fm.G.block(0, 0, n, n) = st.G1;
    fm.G.block(n, n, n, n) = st.G2;
    return fm;
}

Mat fundamental_form(const StructureTensors& st) {
    const FullMatrices fm = full_matrices(st);
    return fm.G * fm.J;
}

NaturalDecomposition decompose_natural(const Mat& M, const MetricSample& ms, const Vec& p) {
    const int n = static_cast<int>(ms.g.rows());
    if (p.size() != n || M.rows() != n || M.cols() != n) throw RejectedInput("dimension mismatch in decompose_natural");
    if (p.isZero(0.0)) throw RejectedInput("decompose_natural needs p != 0");

    const Vec g0 = ms.g_inv * p;
    const double t = 0.5 * p.dot(g0);
    // g^{ij} M_ij = n u + 2t v;  g^{0i} g^{0j} M_ij = 2t u + 4t^2 v
    const double trace = (ms.g_inv.cwiseProduct(M)).sum();
    const double radial = g0.dot(M * g0);
    Eigen::Matrix2d sys;
    sys << n, 2.0 * t, 2.0 * t, 4.0 * t * t;
    const Eigen::Vector2d uv = sys.fullPivLu().solve(Eigen::Vector2d(trace, radial));

    NaturalDecomposition d;
    d.u = uv(0);
    d.v = uv(1);
    d.residual = max_abs(Mat(M - d.u * ms.g - d.v * p * p.transpose()));
    d.exact = d.residual <= 1e-10 * std::max(1.0, max_abs(M));
    return d;
}

}  // namespace kahler
