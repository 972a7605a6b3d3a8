#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nchardy/element.hpp"

namespace nchardy {

/// Relative singular-value floor: values below floor_ratio * sigma_max are
/// treated as kernel and flagged.
inline constexpr double kSigmaFloorRatio = 1e-14;

struct DetValue {
    double value = 0.0;
    bool floored = false;  // a singular value fell below the floor
};

struct PolarData {
    Element unitary_part;
    Element modulus;
    double reconstruction_defect = 0.0;
    bool partial_isometry = false;  // input was rank-deficient at the floor
};

struct MembershipReport {
    bool member = false;
    double defect = 0.0;  // largest violated pairing / out-of-pattern entry
};

enum class MembershipMode { Structural, Dual };

enum class ElementClass { M, A, A0, D, PositiveInvertible };

/// A dyadic rational k * 2^{-log2_den}.
struct Dyadic {
    long k = 1;
    int log2_den = 0;
    double value() const { return static_cast<double>(k) / static_cast<double>(1L << log2_den); }
};

/// tau(x): normalized matrix trace, extended by circle average (exact on the
/// zeroth Fourier coefficient) in the torus model.
Complex trace(const Element& x);

/// (tau(|x|^p))^{1/p} from singular values; p = infinity gives the largest
/// singular value over nodes. Requires p > 0.
double pnorm(const Element& x, double p);

/// Conditional expectation onto D: block-diagonal part, or the zeroth
/// Fourier coefficient as a constant element.
Element phi(const Element& x);

/// Fuglede-Kadison determinant exp(tau(log |x|)).
DetValue fk_det(const Element& x);

/// Torus determinant refined on nested tripling grids with Richardson
/// extrapolation; used by certificates that need more accuracy than the
/// model's fixed K-node quadrature. Falls back to fk_det on MatrixBlock.
DetValue fk_det_fine(const Element& x, double rel_tol = 1e-9, int max_nodes = 59049);

/// pnorm(x, p) along a strictly decreasing grid; approximates det as p -> 0.
std::vector<double> det_as_limit(const Element& x, const std::vector<double>& p_grid);

/// Polar decomposition x = u |x| with unitary completion of u.
PolarData polar(const Element& x);

struct NewtonPowerResult {
    Element root;              // the limit (b + eps)^{p/2}
    int iterations = 0;        // total Heron steps across all halving stages
    bool converged = false;
    bool monotone_psd = true;  // each stage nonincreasing in the PSD order
    double final_step = 0.0;   // last sup-difference between iterates
};

/// Heron/Newton iteration x_{m+1} = (x_m + c x_m^{-1}) / 2 applied within the
/// commutative algebra generated by b, computing (b + eps)^{p/2} for dyadic
/// p = k 2^{-n} in (0, 1]. Matrix arithmetic only (no eigendecompositions);
/// the iterates are evaluated through the numerically stable coupled form.
NewtonPowerResult newton_power_root(const Element& b, Dyadic p, double eps, double tol,
                                    int max_iter = 200);

/// Membership tests. Structural mode inspects the entry/coefficient pattern;
/// dual mode evaluates the trace pairings against a basis of A0 (both models
/// have a finite basis at fixed degree). tol < 0 selects the model default.
MembershipReport in_A(const Element& x, MembershipMode mode = MembershipMode::Structural,
                      double tol = -1.0);
MembershipReport in_A0(const Element& x, MembershipMode mode = MembershipMode::Structural,
                       double tol = -1.0);
MembershipReport in_D(const Element& x, MembershipMode mode = MembershipMode::Structural,
                      double tol = -1.0);

/// Seed-deterministic random elements of the requested class. Class members
/// hold exactly by construction; PositiveInvertible has condition number
/// at most 10^3.
Element random_element(const AlgebraModel& m, ElementClass cls, std::uint64_t seed);

// ---- shared dense helpers (spectral calculus on Hermitian matrices) ----

/// f(H) for Hermitian H via eigendecomposition, f(lambda) = lambda^p with
/// eigenvalues clamped at `clamp` from below.
CMatrix hermitian_power(const CMatrix& h, double p, double clamp = 0.0);

/// Singular values of every node value (torus) or of the single matrix.
std::vector<Eigen::VectorXd> singular_value_sets(const Element& x);

/// Largest singular value over all nodes / the matrix.
double sigma_max(const Element& x);

/// Smallest singular value over all nodes / the matrix.
double sigma_min(const Element& x);

}  // namespace nchardy
