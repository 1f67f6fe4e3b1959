#pragma once

#include "kahler/params.hpp"
#include "kahler/spaceform.hpp"
#include "kahler/tensor.hpp"

namespace kahler {

// A covector p = p_i dx^i at the base point x; coordinates (q, p) on T*M.
struct CotangentPoint {
    Vec x;
    Vec p;
};

// t = 1/2 g^{ik} p_i p_k
double energy_density(const MetricSample& ms, const Vec& p);

// Adapted frame (delta/delta q^i, d/dp_i) with delta/delta q^i = d/dq^i + gamma0_ih d/dp_h.
struct AdaptedFrame {
    Mat gamma0;        // gamma0(i, h) = p_k Gamma^k_{ih}
    Vec g0;            // g0(i) = g^{0i} = p_h g^{hi}
    Mat basis_change;  // columns: adapted frame vectors in (d/dq, d/dp) coordinates

    // Coordinate components -> adapted-frame components.
    Mat inverse() const;
};

AdaptedFrame adapted_frame(const MetricSample& ms, const CotangentPoint& pt);

// n x n blocks of the structure at a point. Index positions follow the
// tensor types: J1, G1, H2 covariant; J2, G2, H1 contravariant.
struct StructureTensors {
    Mat J1;   // a1 g + b1 p p
    Mat J2;   // a2 g^-1 + b2 g0 g0
    Mat G1;   // c1 g + d1 p p
    Mat G2;   // c2 g^-1 + d2 g0 g0
    Mat H1;   // inverse of G1
    Mat H2;   // inverse of G2
    Mat phi;  // phi(i, j) = lambda delta^i_j + mu g^{0i} p_j = phi(d/dp_i, delta/delta q^j)
    double t = 0.0;
};

// Throws InadmissiblePointError when G1 or G2 is not positive definite
// (smallest eigenvalue <= 1e-12 * largest).
StructureTensors structure_tensors(const CoefficientSet& coeffs, const MetricSample& ms, const CotangentPoint& pt);

// 2n x 2n matrices in the adapted frame, horizontal indices first.
// Column a of J holds the frame components of J(E_a):
//   J = [[0, -J2], [J1, 0]],  G = diag(G1, G2).
struct FullMatrices {
    Mat J;
    Mat G;
};
FullMatrices full_matrices(const StructureTensors& st);

// phi(E_a, E_b) = G(E_a, J E_b) as an antisymmetric 2n x 2n matrix.
Mat fundamental_form(const StructureTensors& st);

// Smallest eigenvalue over largest, for a symmetric matrix.
double eigen_ratio(const Mat& m);

// Recovers (u, v) in M = u g + v p p by transvecting with g^{ij} and
// g^{0i} g^{0j}. `exact` is false when the reconstruction leaves a residual
// above 1e-10 * max(1, |M|).
struct NaturalDecomposition {
    double u = 0.0;
    double v = 0.0;
    double residual = 0.0;
    bool exact = false;
};
NaturalDecomposition decompose_natural(const Mat& M, const MetricSample& ms, const Vec& p);

}  // namespace kahler
