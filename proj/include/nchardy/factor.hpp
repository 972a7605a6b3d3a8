#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nchardy/algebra.hpp"

namespace nchardy {

struct FactorResiduals {
    double reconstruction = 0.0;
    double unitarity = 0.0;
    double membership = 0.0;
    double inverse_membership = 0.0;
};

/// w = unitary * analytic with analytic (and, when computed, its inverse)
/// certified in A.
struct FactorizationResult {
    Element unitary;
    Element analytic;
    std::optional<Element> analytic_inverse;
    FactorResiduals residuals;
};

/// QR along the block flag with the positive-diagonal convention; the
/// returned analytic factor is invertible with inverse in A.
FactorizationResult arveson_factor(const Element& x);

struct SzegoProjectionCertificate {
    double modulus_in_D = 0.0;      // in_D defect of |y|
    double orthogonality = 0.0;     // max normalized cross pairing of the three spans
    double phi_product = 0.0;       // || Phi(h) Phi(h^{-1}) - 1 ||
    double gram_condition = 0.0;
    bool gram_ill_conditioned = false;  // condition > 1e12
    bool y_full_support = true;
};

/// L2-projection construction: project w onto span{w a : a in basis(A0)},
/// take y = w - residual's polar unitary, h = u* w. MatrixBlock only.
std::pair<FactorizationResult, SzegoProjectionCertificate> szego_factor_projection(const Element& w);

struct ScalarOuterResult {
    Element outer;
    double modulus_residual = 0.0;       // sup-node relative | |h| - w | / w
    double negative_defect = 0.0;        // analytic defect after truncation
    double det_certificate_gap = 0.0;    // | Delta(w) - |h^(0)| | / Delta(w), refined quadrature
};

/// Classical outer function h = exp(analytic completion of log w) for a
/// nonnegative scalar symbol, computed on internally refined grids.
ScalarOuterResult outer_factor_scalar(const Element& w);

struct WilsonResult {
    Element factor;                      // analytic h with h(t)* h(t) = w(t)
    int iterations = 0;
    bool converged = false;
    double sup_residual = 0.0;           // sup-node || h*h - w ||
    double det_certificate_gap = 0.0;    // | Delta(h^(0)) - Delta(h) | / Delta(h), refined
    std::vector<double> residual_trace;
};

/// Newton-type spectral factorization of a Hermitian positive definite
/// matrix symbol, initialized with the Cholesky factor of the zeroth
/// coefficient; analytic projection halves the zeroth coefficient.
WilsonResult wilson_factor(const Element& w, int max_iter = 200, double tol = 1e-10);

/// Szego factorization w = u h for invertible w; for min(p, q) < 2 the
/// m-fold splitting w = v|w|^{1/m} ... |w|^{1/m} is exercised with m the
/// smallest integer making mp, mq >= 2.
FactorizationResult szego_factor(const Element& w, double p, double q);

struct RieszResult {
    Element y;
    Element z;
    double p = 0.0, q = 0.0, r = 0.0;
    double reconstruction = 0.0;  // sup | y z - x |
    double membership_y = 0.0, membership_z = 0.0;
    double norm_x = 0.0, norm_y = 0.0, norm_z = 0.0;
    double bound_slack = 0.0;     // ||y||_q ||z||_r - (||x||_p + eps); <= 0 when satisfied
    bool attained = false;
};

/// Riesz factorization x = y z with ||y||_q ||z||_r <= ||x||_p + eps,
/// 1/p = 1/q + 1/r. The internal regularization of (x*x + delta)^{1/2} is
/// refined until the norm budget holds.
RieszResult riesz_factor(const Element& x, double q, double r, double eps);

/// Attained variant through the inner-outer pathway; requires Delta(x) > 0
/// and achieves ||y||_q ||z||_r = ||x||_p.
RieszResult riesz_factor_attained(const Element& x, double q, double r);

struct InnerOuterResult {
    Element inner;   // unitary in A
    Element outer;
    double reconstruction = 0.0;
    double inner_unitarity = 0.0;
    double inner_membership = 0.0;
};

/// x = (inner)(outer) for x in A with Delta(x) > 0.
InnerOuterResult inner_outer(const Element& x);

enum class Side { Left, Right, Bilateral };

struct OuterReport {
    bool left = false;
    bool right = false;
    bool bilateral = false;
    double det_h = 0.0;
    double det_phi_h = 0.0;
    bool det_criterion = false;  // det_h = det_phi_h (rel 1e-8) and det_h > 0
    int rank_left = 0;
    int rank_right = 0;
    int rank_bilateral = 0;
    int rank_full = 0;
    // torus: distance from 1 to the truncated spans; the verdicts use these
    double dist_left = 0.0, dist_right = 0.0, dist_bilateral = 0.0;
    bool rank_oracle_exact = true;  // false for torus (truncation-limited)
    std::string note;
};

/// Outer classification. MatrixBlock: exact rank oracle over the span of
/// {h b}, {b h}, {b h b'} against dim A. Torus: least-squares distance from
/// the identity to the truncated spans (approximation noted in the report);
/// the determinant criterion is evaluated in both models.
OuterReport is_outer(const Element& h);

/// dim of the span of {h b}, {b h} or {b h b'} over a basis {b} of A,
/// as subspaces of M_n. MatrixBlock only.
int subspace_rank(const Element& h, Side side);

}  // namespace nchardy
