#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "nchardy/model.hpp"

namespace nchardy {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// An element of M in the selected model.
///
/// MatrixBlock elements hold a dense n x n matrix. Torus elements hold a
/// finitely supported family of Fourier coefficients k -> n x n matrix;
/// evaluation at a point of the circle is exact, so products (coefficient
/// convolution) may grow the stored frequency range beyond the model degree.
/// Elements are immutable after construction.
class Element {
public:
    Element() = default;

    static Element zero(const AlgebraModel& m);
    static Element identity(const AlgebraModel& m);
    static Element from_matrix(const AlgebraModel& m, CMatrix x);
    static Element from_coeffs(const AlgebraModel& m, std::map<int, CMatrix> coeffs);
    /// Inverse DFT of values at the K model nodes onto the symmetric
    /// frequency window [-(K-1)/2, (K-1)/2]; interpolates the values exactly.
    static Element from_node_values(const AlgebraModel& m, const std::vector<CMatrix>& values);

    const AlgebraModel& model() const { return model_; }
    bool is_torus() const { return model_.is_torus(); }

    const CMatrix& matrix() const;                  // MatrixBlock
    const std::map<int, CMatrix>& coeffs() const;   // torus kinds
    CMatrix coeff(int k) const;                     // zero matrix if absent
    int min_freq() const;
    int max_freq() const;

    CMatrix eval(double theta) const;
    /// Values at the K uniform quadrature nodes theta_j = 2 pi j / K.
    std::vector<CMatrix> node_values() const;

    Element adjoint() const;
    Element operator+(const Element& o) const;
    Element operator-(const Element& o) const;
    Element operator*(const Element& o) const;
    Element operator*(Complex s) const;
    Element operator-() const { return *this * Complex(-1.0, 0.0); }
    friend Element operator*(Complex s, const Element& x) { return x * s; }

    /// Largest entry magnitude over the matrix / all stored coefficients.
    double sup_abs() const;

    bool approx_equal(const Element& o, double tol = -1.0) const;

private:
    AlgebraModel model_;
    CMatrix mat_;
    std::map<int, CMatrix> coeffs_;

    void require_same_model(const Element& o) const;
};

/// Quadrature node angles for a torus model.
std::vector<double> node_angles(const AlgebraModel& m);

}  // namespace nchardy
