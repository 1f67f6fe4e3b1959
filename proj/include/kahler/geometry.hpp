#pragma once

#include <optional>

#include "kahler/bundle.hpp"
#include "kahler/params.hpp"
#include "kahler/spaceform.hpp"
#include "kahler/tensor.hpp"

namespace kahler {

// Frame-index layout used throughout: adapted frame E_a with
// E_i = delta/delta q^i for a = i in [0, n) and E_{n+i} = d/dp_i.

struct GeometryConfig {
    SpaceFormChart chart;
    LambdaFamily family;
    Perturbation perturbation{};

    int n() const { return chart.n(); }
    double c() const { return chart.c(); }
    double A() const { return family.A(); }
};

// Everything the closed forms need at one bundle point.
struct PointState {
    CotangentPoint pt;
    MetricSample ms;
    AdaptedFrame frame;
    CoefficientSet coeffs;
    StructureTensors st;
};

PointState evaluate_point(const GeometryConfig& cfg, const CotangentPoint& pt);

// z = (x, p) coordinates on T*M.
Vec to_coordinates(const CotangentPoint& pt);
CotangentPoint from_coordinates(const Vec& z);

// Default step for bundle finite differences: 1e-4 * max(1, |p|).
double default_bundle_step(const CotangentPoint& pt);

// Frame components of the brackets of the adapted frame,
//   [E_a, E_b] = C(f, a, b) E_f,
// from the closed-form bracket relations of the adapted frame.
Tensor3 frame_brackets(const PointState& s);
// The same brackets computed from coordinate components by finite differences.
Tensor3 coordinate_frame_brackets(const GeometryConfig& cfg, const CotangentPoint& pt,
                                  std::optional<double> h = std::nullopt);

// E_a(t) for every frame vector; the horizontal entries vanish.
Vec frame_derivative_of_energy(const GeometryConfig& cfg, const CotangentPoint& pt,
                               std::optional<double> h = std::nullopt);

// p_h R^h_{kij} stored as (k, i, j).
Tensor3 contracted_curvature(const MetricSample& ms, const Vec& p);

// ---------------------------------------------------------------- Nijenhuis

// Blocks of N in the adapted frame:
//   hh(k, i, j): d/dp_k component of N(E_i, E_j)
//   hv(k, i, j): delta/delta q^k component of N(E_i, E_{n+j})
//   vv(k, i, j): d/dp_k component of N(E_{n+i}, E_{n+j})
// `off_block` is the largest component outside those positions (zero for
// the closed form; reported by the oracle).
struct NijenhuisBlocks {
    Tensor3 hh, hv, vv;
    double off_block = 0.0;
    double max_abs() const;
};

NijenhuisBlocks nijenhuis_closed_form(const GeometryConfig& cfg, const CotangentPoint& pt);
// N(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] with every bracket taken on
// coordinate components, J and the frame differenced numerically.
NijenhuisBlocks nijenhuis_oracle(const GeometryConfig& cfg, const CotangentPoint& pt,
                                 std::optional<double> h = std::nullopt);
double max_difference(const NijenhuisBlocks& a, const NijenhuisBlocks& b);

// --------------------------------------------------------------- connection

// Q(h, i, j) = Q^{ij}_h, P(h, i, j) = P^{hi}_j, S(h, i, j) = S_hij and the base
// Christoffel symbols gamma(k, i, j) = Gamma^k_ij.
struct ConnectionCoeffs {
    Tensor3 Q, P, S, gamma;
};

// Fibre-derivative formulas, valid for any coefficient set.
ConnectionCoeffs connection_generic(const GeometryConfig& cfg, const CotangentPoint& pt);
// Space-form closed forms taken literally, Q included.
ConnectionCoeffs connection_closed_form(const GeometryConfig& cfg, const CotangentPoint& pt);
// Production connection: P and S from the closed forms, Q from the generic
// path. The literal Q closed form disagrees with the generic one.
ConnectionCoeffs connection_coeffs(const GeometryConfig& cfg, const CotangentPoint& pt);

// nabla_{E_a} E_b = conn(c, a, b) E_c
Tensor3 frame_connection(const ConnectionCoeffs& cc);

// Levi-Civita connection of G in the adapted frame from the Koszul formula,
// with frame derivatives of G taken by finite differences.
Tensor3 koszul_oracle(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);

// max |nabla_a E_b - nabla_b E_a - [E_a, E_b]| for connection_coeffs.
double torsion_residual(const GeometryConfig& cfg, const CotangentPoint& pt);
// max |(nabla_{E_w} G)(E_b, E_c)| and max |(nabla_{E_w} J)^e_c|.
double nabla_G_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);
double nabla_J_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);

// ---------------------------------------------------------------- curvature

// The six closed-form blocks, each indexed (h, k, i, j) with h the output
// component:
//   hh_h: delta_h part of K(E_i, E_j) E_k       hh_v: d/dp_h part of K(E_i, E_j) E_{n+k}
//   vv_h: delta_h part of K(E_{n+i}, E_{n+j}) E_k
//   vv_v: d/dp_h part of K(E_{n+i}, E_{n+j}) E_{n+k}
//   vh_v: d/dp_h part of K(E_{n+i}, E_j) E_k    vh_h: delta_h part of K(E_{n+i}, E_j) E_{n+k}
struct CurvatureBlocks {
    Tensor4 hh_h, hh_v, vv_h, vv_v, vh_v, vh_h;
};

CurvatureBlocks curvature_blocks(const GeometryConfig& cfg, const CotangentPoint& pt);
CurvatureBlocks curvature_blocks(const PointState& s);

// Full tensor K(e, c, a, b) = e-component of K(E_a, E_b) E_c.
Tensor4 assemble_curvature(const CurvatureBlocks& kb);

// K(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z evaluated by
// differencing connection_coeffs along the frame.
Tensor4 curvature_oracle(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);

// max |G(K(X,Y)Z, W) + G(K(X,Y)W, Z)| over frame quadruples.
double curvature_skew_residual(const Tensor4& K, const Mat& G);

struct RicciBlocks {
    Mat hh;     // Ric(E_i, E_j)
    Mat vv;     // Ric(E_{n+i}, E_{n+j})
    Mat mixed;  // Ric(E_{n+i}, E_j)
    Mat full;   // 2n x 2n
};
RicciBlocks ricci_blocks(const CurvatureBlocks& kb, const StructureTensors& st);
// max over blocks of |Ric - (c n / A) G| / max(1, |G|).
double einstein_residual(const RicciBlocks& ric, const StructureTensors& st, double einstein_constant);

// max |(nabla_{E_w} K)(e, c, a, b)| with K from the closed-form blocks.
double nabla_K_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);

// H(X) = G(K(X, JX) JX, X) / G(X, X)^2, X in adapted-frame components.
class HolomorphicCurvature {
public:
    HolomorphicCurvature(const GeometryConfig& cfg, const CotangentPoint& pt);
    double operator()(const Vec& X) const;

private:
    Tensor4 K_;
    Mat J_;
    Mat G_;
};
double holomorphic_sectional_curvature(const GeometryConfig& cfg, const CotangentPoint& pt, const Vec& X);

// ------------------------------------------------------------ fundamental form

// Coordinate components phi(d_mu, d_nu) with z = (q, p).
Mat coordinate_fundamental_form(const GeometryConfig& cfg, const CotangentPoint& pt);
// (d phi)(d_mu, d_nu, d_rho) by central differences of the coordinate components.
Tensor3 exterior_derivative_phi(const GeometryConfig& cfg, const CotangentPoint& pt,
                                std::optional<double> h = std::nullopt);
// (lambda' - mu) * (g^{0h} Dp_h ^ Dp_i ^ dq^i) on coordinate triples, wedge
// products normalised as determinants.
Tensor3 dphi_reference_form(const GeometryConfig& cfg, const CotangentPoint& pt);
// max |d phi| over coordinate triples.
double dphi_residual(const GeometryConfig& cfg, const CotangentPoint& pt, std::optional<double> h = std::nullopt);

}  // namespace kahler
