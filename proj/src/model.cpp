#include "nchardy/model.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nchardy {

AlgebraModel AlgebraModel::matrix_block(std::vector<int> blocks) {
    AlgebraModel m;
    m.kind = ModelKind::MatrixBlock;
    m.blocks = std::move(blocks);
    m.n = std::accumulate(m.blocks.begin(), m.blocks.end(), 0);
    m.validate();
    return m;
}

AlgebraModel AlgebraModel::torus_matrix(int n, int degree, int quad_nodes) {
    AlgebraModel m;
    m.kind = ModelKind::TorusMatrix;
    m.n = n;
    m.degree = degree;
    m.quad_nodes = quad_nodes > 0 ? quad_nodes : 4 * degree + 1;
    if (m.quad_nodes % 2 == 0) m.quad_nodes += 1;  // odd K keeps the window symmetric
    m.validate();
    return m;
}

AlgebraModel AlgebraModel::torus_scalar(int degree, int quad_nodes) {
    AlgebraModel m = torus_matrix(1, degree, quad_nodes);
    m.kind = ModelKind::TorusScalar;
    return m;
}

void AlgebraModel::validate() const {
    if (n < 1) throw std::invalid_argument("model: n must be positive");
    if (kind == ModelKind::MatrixBlock) {
        if (blocks.empty()) throw std::invalid_argument("model: empty block list");
        int sum = 0;
        for (int b : blocks) {
            if (b < 1) throw std::invalid_argument("model: every block must be >= 1");
            sum += b;
        }
        if (sum != n) throw std::invalid_argument("model: blocks must sum to n");
    } else {
        if (kind == ModelKind::TorusScalar && n != 1)
            throw std::invalid_argument("model: TorusScalar requires n = 1");
        if (degree < 0) throw std::invalid_argument("model: negative degree");
        if (quad_nodes < 4 * degree + 1)
            throw std::invalid_argument("model: quad_nodes must be >= 4*degree + 1");
    }
}

int AlgebraModel::block_of(int row) const {
    int acc = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        acc += blocks[b];
        if (row < acc) return static_cast<int>(b);
    }
    throw std::out_of_range("model: row index out of range");
}

int AlgebraModel::dim_D() const {
    if (is_torus()) return n * n;
    int d = 0;
    for (int b : blocks) d += b * b;
    return d;
}

int AlgebraModel::dim_A() const {
    if (is_torus()) return n * n * (degree + 1);
    int d = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i; j < blocks.size(); ++j) d += blocks[i] * blocks[j];
    return d;
}

int AlgebraModel::dim_A0() const { return dim_A() - dim_D(); }

std::string AlgebraModel::describe() const {
    std::ostringstream os;
    switch (kind) {
        case ModelKind::MatrixBlock: {
            os << "MatrixBlock n=" << n << " blocks=[";
            for (std::size_t i = 0; i < blocks.size(); ++i)
                os << (i ? "," : "") << blocks[i];
            os << "]";
            break;
        }
        case ModelKind::TorusMatrix:
            os << "TorusMatrix n=" << n << " N=" << degree << " K=" << quad_nodes;
            break;
        case ModelKind::TorusScalar:
            os << "TorusScalar N=" << degree << " K=" << quad_nodes;
            break;
    }
    return os.str();
}

}  // namespace nchardy
