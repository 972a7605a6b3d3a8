#pragma once

// Test-side construction helpers and independent oracles. These stay off the
// implementation paths they check: powers go through eigendecompositions here,
// while newton_power_root uses matrix arithmetic only.

#include <map>
#include <vector>

#include "nchardy/algebra.hpp"
#include "nchardy/rng.hpp"

namespace oracle {

using nchardy::AlgebraModel;
using nchardy::CMatrix;
using nchardy::Complex;
using nchardy::Element;

inline Element scalar_poly(const AlgebraModel& m, const std::vector<Complex>& c, int k0 = 0) {
    std::map<int, CMatrix> coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) {
        CMatrix v(1, 1);
        v(0, 0) = c[i];
        coeffs[k0 + static_cast<int>(i)] = v;
    }
    return Element::from_coeffs(m, std::move(coeffs));
}

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline CMatrix random_unitary(int n, std::uint64_t seed) {
    nchardy::Rng rng(seed);
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
    Eigen::HouseholderQR<CMatrix> qr(g);
    return qr.householderQ();
}

/// (b + eps)^{p/2} by spectral calculus; the independent check for the
/// Heron/Newton iteration.
inline Element spectral_power_root(const Element& b, double p, double eps) {
    const AlgebraModel& m = b.model();
    auto f = [&](const CMatrix& v) {
        return nchardy::hermitian_power(
            (v + v.adjoint()) * 0.5 + eps * CMatrix::Identity(v.rows(), v.cols()), p / 2.0);
    };
    if (!m.is_torus()) return Element::from_matrix(m, f(b.matrix()));
    std::vector<CMatrix> vals = b.node_values();
    for (CMatrix& v : vals) v = f(v);
    return Element::from_node_values(m, vals);
}

/// Circle average of log f by dense trapezoid quadrature; independent of
/// fk_det's node layout and flooring.
inline double mean_log(const std::function<double(double)>& f, int K = 200001) {
    double acc = 0.0;
    for (int j = 0; j < K; ++j) acc += std::log(f(2.0 * M_PI * j / K));
    return acc / K;
}

}  // namespace oracle
