#pragma once

#include <vector>
#include <string>

namespace nchardy {

enum class ModelKind { MatrixBlock, TorusMatrix, TorusScalar };

/// Selects one of the two concrete subdiagonal-algebra models.
///
/// MatrixBlock: M = complex n x n matrices with the normalized trace tr/n,
///   A = block upper triangular matrices for the flag given by `blocks`,
///   D = block diagonal, Phi = block-diagonal extraction.
/// TorusMatrix / TorusScalar: M = matrix-valued trigonometric polynomials on
///   the circle (frequencies in [-degree, degree]), tau = circle average of
///   tr/n, A = analytic elements (no negative frequencies), D = constants,
///   Phi = zeroth Fourier coefficient. Nonlinear functionals (norms,
///   determinants, moduli) are evaluated on `quad_nodes` uniform nodes.
struct AlgebraModel {
    ModelKind kind = ModelKind::MatrixBlock;
    int n = 1;
    std::vector<int> blocks;  // MatrixBlock only; sizes sum to n
    int degree = 0;           // torus kinds: Fourier truncation degree N
    int quad_nodes = 0;       // torus kinds: K uniform nodes, odd, K >= 4N+1

    static AlgebraModel matrix_block(std::vector<int> blocks);
    static AlgebraModel torus_matrix(int n, int degree, int quad_nodes = 0);
    static AlgebraModel torus_scalar(int degree, int quad_nodes = 0);

    bool is_torus() const { return kind != ModelKind::MatrixBlock; }

    /// Entrywise equality tolerance: 1e-12 (MatrixBlock) / 1e-10 (torus).
    double default_tol() const { return is_torus() ? 1e-10 : 1e-12; }

    int dim_A() const;
    int dim_A0() const;
    int dim_D() const;

    // MatrixBlock flag bookkeeping
    int block_of(int row) const;
    bool in_upper(int i, int j) const { return block_of(i) <= block_of(j); }
    bool in_strict_upper(int i, int j) const { return block_of(i) < block_of(j); }
    bool in_diagonal(int i, int j) const { return block_of(i) == block_of(j); }

    bool operator==(const AlgebraModel&) const = default;

    std::string describe() const;

    /// Throws std::invalid_argument on an inconsistent model.
    void validate() const;
};

}  // namespace nchardy
