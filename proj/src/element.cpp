#include "nchardy/element.hpp"

#include <cmath>
#include <stdexcept>

namespace nchardy {

namespace {
bool negligible(const CMatrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }
}  // namespace

std::vector<double> node_angles(const AlgebraModel& m) {
    std::vector<double> th(m.quad_nodes);
    for (int j = 0; j < m.quad_nodes; ++j)
        th[j] = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m.quad_nodes);
    return th;
}

Element Element::zero(const AlgebraModel& m) {
    m.validate();
    Element x;
    x.model_ = m;
    if (!m.is_torus()) x.mat_ = CMatrix::Zero(m.n, m.n);
    return x;
}

Element Element::identity(const AlgebraModel& m) {
    Element x = zero(m);
    if (m.is_torus())
        x.coeffs_[0] = CMatrix::Identity(m.n, m.n);
    else
        x.mat_ = CMatrix::Identity(m.n, m.n);
    return x;
}

Element Element::from_matrix(const AlgebraModel& m, CMatrix v) {
    if (m.is_torus()) throw std::invalid_argument("from_matrix: torus model");
    if (v.rows() != m.n || v.cols() != m.n)
        throw std::invalid_argument("from_matrix: wrong dimensions");
    Element x;
    x.model_ = m;
    x.mat_ = std::move(v);
    return x;
}

Element Element::from_coeffs(const AlgebraModel& m, std::map<int, CMatrix> coeffs) {
    if (!m.is_torus()) throw std::invalid_argument("from_coeffs: matrix model");
    Element x;
    x.model_ = m;
    for (auto& [k, c] : coeffs) {
        if (c.rows() != m.n || c.cols() != m.n)
            throw std::invalid_argument("from_coeffs: wrong coefficient dimensions");
        if (!negligible(c)) x.coeffs_[k] = std::move(c);
    }
    return x;
}

Element Element::from_node_values(const AlgebraModel& m, const std::vector<CMatrix>& values) {
    if (!m.is_torus()) throw std::invalid_argument("from_node_values: matrix model");
    const int K = m.quad_nodes;
    if (static_cast<int>(values.size()) != K)
        throw std::invalid_argument("from_node_values: expected one value per node");
    const int M = (K - 1) / 2;
    std::map<int, CMatrix> coeffs;
    for (int k = -M; k <= M; ++k) {
        CMatrix c = CMatrix::Zero(m.n, m.n);
        for (int j = 0; j < K; ++j) {
            const double a = -2.0 * M_PI * k * j / K;
            c += values[j] * Complex(std::cos(a), std::sin(a));
        }
        c /= static_cast<double>(K);
        if (!negligible(c)) coeffs[k] = std::move(c);
    }
    return from_coeffs(m, std::move(coeffs));
}

const CMatrix& Element::matrix() const {
    if (model_.is_torus()) throw std::logic_error("matrix(): torus element");
    return mat_;
}

const std::map<int, CMatrix>& Element::coeffs() const {
    if (!model_.is_torus()) throw std::logic_error("coeffs(): matrix element");
    return coeffs_;
}

CMatrix Element::coeff(int k) const {
    auto it = coeffs_.find(k);
    if (it == coeffs_.end()) return CMatrix::Zero(model_.n, model_.n);
    return it->second;
}

int Element::min_freq() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
int Element::max_freq() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

CMatrix Element::eval(double theta) const {
    if (!model_.is_torus()) return mat_;
    CMatrix v = CMatrix::Zero(model_.n, model_.n);
    for (const auto& [k, c] : coeffs_)
        v += c * Complex(std::cos(k * theta), std::sin(k * theta));
    return v;
}

std::vector<CMatrix> Element::node_values() const {
    if (!model_.is_torus()) return {mat_};
    std::vector<CMatrix> out;
    out.reserve(model_.quad_nodes);
    for (double th : node_angles(model_)) out.push_back(eval(th));
    return out;
}

void Element::require_same_model(const Element& o) const {
    if (!(model_ == o.model_)) throw std::invalid_argument("element: model mismatch");
}

Element Element::adjoint() const {
    Element r;
    r.model_ = model_;
    if (!model_.is_torus()) {
        r.mat_ = mat_.adjoint();
        return r;
    }
    for (const auto& [k, c] : coeffs_) r.coeffs_[-k] = c.adjoint();
    return r;
}

Element Element::operator+(const Element& o) const {
    require_same_model(o);
    Element r;
    r.model_ = model_;
    if (!model_.is_torus()) {
        r.mat_ = mat_ + o.mat_;
        return r;
    }
    r.coeffs_ = coeffs_;
    for (const auto& [k, c] : o.coeffs_) {
        auto it = r.coeffs_.find(k);
        if (it == r.coeffs_.end())
            r.coeffs_[k] = c;
        else {
            it->second += c;
            if (negligible(it->second)) r.coeffs_.erase(it);
        }
    }
    return r;
}

Element Element::operator-(const Element& o) const { return *this + (o * Complex(-1.0, 0.0)); }

Element Element::operator*(const Element& o) const {
    require_same_model(o);
    Element r;
    r.model_ = model_;
    if (!model_.is_torus()) {
        r.mat_ = mat_ * o.mat_;
        return r;
    }
    // coefficient convolution; the frequency range grows additively
    for (const auto& [k1, c1] : coeffs_)
        for (const auto& [k2, c2] : o.coeffs_) {
            const int k = k1 + k2;
            auto it = r.coeffs_.find(k);
            if (it == r.coeffs_.end())
                r.coeffs_[k] = c1 * c2;
            else
                it->second += c1 * c2;
        }
    for (auto it = r.coeffs_.begin(); it != r.coeffs_.end();)
        it = negligible(it->second) ? r.coeffs_.erase(it) : std::next(it);
    return r;
}

Element Element::operator*(Complex s) const {
    Element r;
    r.model_ = model_;
    if (!model_.is_torus()) {
        r.mat_ = mat_ * s;
        return r;
    }
    if (s == Complex(0.0, 0.0)) return r;
    for (const auto& [k, c] : coeffs_) r.coeffs_[k] = c * s;
    return r;
}

double Element::sup_abs() const {
    if (!model_.is_torus()) return mat_.size() ? mat_.cwiseAbs().maxCoeff() : 0.0;
    double m = 0.0;
    for (const auto& [k, c] : coeffs_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

bool Element::approx_equal(const Element& o, double tol) const {
    if (!(model_ == o.model_)) return false;
    if (tol < 0) tol = model_.default_tol();
    return (*this - o).sup_abs() <= tol;
}

}  // namespace nchardy
