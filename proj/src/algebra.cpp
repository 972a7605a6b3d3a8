#include "nchardy/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nchardy/rng.hpp"

namespace nchardy {

namespace {

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd singular_values(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues();
}

double min_herm_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es((h + h.adjoint()) * 0.5);
    return es.eigenvalues().minCoeff();
}

}  // namespace

CMatrix hermitian_power(const CMatrix& h, double p, double clamp) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es((h + h.adjoint()) * 0.5);
    Eigen::VectorXd lam = es.eigenvalues();
    Eigen::VectorXd f(lam.size());
    for (int i = 0; i < lam.size(); ++i) {
        const double v = std::max(lam[i], clamp);
        f[i] = v > 0.0 ? std::pow(v, p) : 0.0;
    }
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<Eigen::VectorXd> singular_value_sets(const Element& x) {
    std::vector<Eigen::VectorXd> out;
    for (const CMatrix& v : x.node_values()) out.push_back(singular_values(v));
    return out;
}

double sigma_max(const Element& x) {
    double s = 0.0;
    for (const auto& sv : singular_value_sets(x)) s = std::max(s, sv.size() ? sv.maxCoeff() : 0.0);
    return s;
}

double sigma_min(const Element& x) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& sv : singular_value_sets(x)) s = std::min(s, sv.size() ? sv.minCoeff() : 0.0);
    return std::isfinite(s) ? s : 0.0;
}

Complex trace(const Element& x) {
    const int n = x.model().n;
    if (!x.is_torus()) return x.matrix().trace() / static_cast<double>(n);
    return x.coeff(0).trace() / static_cast<double>(n);
}

double pnorm(const Element& x, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("pnorm: p must be positive");
    const auto sets = singular_value_sets(x);
    if (std::isinf(p)) {
        double s = 0.0;
        for (const auto& sv : sets) s = std::max(s, sv.size() ? sv.maxCoeff() : 0.0);
        return s;
    }
    const int n = x.model().n;
    double acc = 0.0;
    for (const auto& sv : sets) {
        double node = 0.0;
        for (int i = 0; i < sv.size(); ++i) node += sv[i] > 0.0 ? std::pow(sv[i], p) : 0.0;
        acc += node / n;
    }
    acc /= static_cast<double>(sets.size());
    return std::pow(acc, 1.0 / p);
}

Element phi(const Element& x) {
    const AlgebraModel& m = x.model();
    if (m.is_torus()) {
        std::map<int, CMatrix> c;
        c[0] = x.coeff(0);
        return Element::from_coeffs(m, std::move(c));
    }
    CMatrix d = x.matrix();
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (!m.in_diagonal(i, j)) d(i, j) = 0.0;
    return Element::from_matrix(m, std::move(d));
}

DetValue fk_det(const Element& x) {
    const auto sets = singular_value_sets(x);
    const int n = x.model().n;
    double smax = 0.0;
    for (const auto& sv : sets) smax = std::max(smax, sv.size() ? sv.maxCoeff() : 0.0);
    if (smax == 0.0) return {0.0, true};
    const double floor = kSigmaFloorRatio * smax;
    double acc = 0.0;
    for (const auto& sv : sets) {
        for (int i = 0; i < sv.size(); ++i) {
            if (sv[i] < floor) return {0.0, true};
            acc += std::log(sv[i]) / n;
        }
    }
    return {std::exp(acc / static_cast<double>(sets.size())), false};
}

DetValue fk_det_fine(const Element& x, double rel_tol, int max_nodes) {
    if (!x.is_torus()) return fk_det(x);
    const int n = x.model().n;
    const double smax = sigma_max(x);
    if (smax == 0.0) return {0.0, true};
    const double floor = kSigmaFloorRatio * smax;

    auto level_mean = [&](int K, bool& floored) {
        double acc = 0.0;
        for (int j = 0; j < K; ++j) {
            const CMatrix v = x.eval(2.0 * M_PI * j / K);
            const Eigen::VectorXd sv = singular_values(v);
            for (int i = 0; i < sv.size(); ++i) {
                if (sv[i] < floor) {
                    floored = true;
                    return 0.0;
                }
                acc += std::log(sv[i]) / n;
            }
        }
        return acc / K;
    };

    bool floored = false;
    int K = 243;  // 3^5; tripling keeps the node sets nested
    double prev = level_mean(K, floored);
    if (floored) return {0.0, true};
    double prev_ext = prev;
    bool have_ext = false;
    while (3 * K <= std::max(max_nodes, 729)) {
        K *= 3;
        const double cur = level_mean(K, floored);
        if (floored) return {0.0, true};
        const double ext = (3.0 * cur - prev) / 2.0;  // removes the 1/K error term
        if (have_ext && std::abs(ext - prev_ext) <= rel_tol) return {std::exp(ext), false};
        prev = cur;
        prev_ext = ext;
        have_ext = true;
    }
    return {std::exp(prev_ext), false};
}

std::vector<double> det_as_limit(const Element& x, const std::vector<double>& p_grid) {
    if (p_grid.empty()) throw std::invalid_argument("det_as_limit: empty grid");
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > 0.0)) throw std::invalid_argument("det_as_limit: nonpositive p");
        if (i && !(p_grid[i] < p_grid[i - 1]))
            throw std::invalid_argument("det_as_limit: grid must be strictly decreasing");
    }
    std::vector<double> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) out.push_back(pnorm(x, p));
    return out;
}

PolarData polar(const Element& x) {
    const AlgebraModel& m = x.model();
    const double smax = sigma_max(x);
    const double floor = kSigmaFloorRatio * std::max(smax, 1e-300);
    const bool deficient = sigma_min(x) < floor;

    auto polar_node = [&](const CMatrix& v) -> std::pair<CMatrix, CMatrix> {
        if (!deficient) {
            // canonical unitary part u = v (v*v)^{-1/2}
            const CMatrix mod = hermitian_power(v.adjoint() * v, 0.5);
            const CMatrix inv_mod = hermitian_power(v.adjoint() * v, -0.5);
            return {v * inv_mod, mod};
        }
        Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const CMatrix u = svd.matrixU() * svd.matrixV().adjoint();
        const CMatrix mod = svd.matrixV() * svd.singularValues().asDiagonal() *
                            svd.matrixV().adjoint();
        return {u, mod};
    };

    PolarData out;
    out.partial_isometry = deficient;
    if (!m.is_torus()) {
        auto [u, mod] = polar_node(x.matrix());
        out.unitary_part = Element::from_matrix(m, u);
        out.modulus = Element::from_matrix(m, mod);
        out.reconstruction_defect = max_abs(u * mod - x.matrix());
        return out;
    }
    const auto vals = x.node_values();
    std::vector<CMatrix> us, mods;
    double defect = 0.0;
    for (const CMatrix& v : vals) {
        auto [u, mod] = polar_node(v);
        defect = std::max(defect, max_abs(u * mod - v));
        us.push_back(std::move(u));
        mods.push_back(std::move(mod));
    }
    out.unitary_part = Element::from_node_values(m, us);
    out.modulus = Element::from_node_values(m, mods);
    out.reconstruction_defect = defect;
    return out;
}

NewtonPowerResult newton_power_root(const Element& b, Dyadic p, double eps, double tol,
                                    int max_iter) {
    if (p.k < 1 || p.log2_den < 0 || p.value() <= 0.0 || p.value() > 1.0)
        throw std::invalid_argument("newton_power_root: p must be dyadic in (0, 1]");
    if (!(tol > 0.0) || eps < 0.0)
        throw std::invalid_argument("newton_power_root: bad eps/tol");
    const double scale = std::max(b.sup_abs(), 1.0);
    if ((b - b.adjoint()).sup_abs() > 100.0 * b.model().default_tol() * scale)
        throw std::invalid_argument("newton_power_root: b is not Hermitian");

    const AlgebraModel& m = b.model();
    std::vector<CMatrix> cur = b.node_values();
    const CMatrix id = CMatrix::Identity(m.n, m.n);
    for (CMatrix& v : cur) {
        v = (v + v.adjoint()) * 0.5 + eps * id;
        if (min_herm_eigenvalue(v) <= 0.0)
            throw std::invalid_argument("newton_power_root: b + eps is not positive definite");
    }

    // integer power (b + eps)^k, matrix products only
    {
        std::vector<CMatrix> acc(cur.size(), id), base = cur;
        long e = p.k;
        while (e > 0) {
            if (e & 1)
                for (std::size_t j = 0; j < acc.size(); ++j) acc[j] = acc[j] * base[j];
            e >>= 1;
            if (e)
                for (std::size_t j = 0; j < base.size(); ++j) base[j] = base[j] * base[j];
        }
        cur = std::move(acc);
    }

    NewtonPowerResult out;
    int total = 0;
    const double psd_slack = 1e-11;
    for (int stage = 0; stage <= p.log2_den; ++stage) {
        // Heron square root of `cur`: x_{m+1} = (x_m + c x_m^{-1}) / 2 from
        // x_1 = c, staying in the algebra generated by b. The iterates are
        // computed through the coupled (Denman-Beavers) rewriting, which
        // produces the same sequence but does not amplify rounding in the
        // non-commuting directions. The stage is normalized to unit scale.
        double s = 0.0;
        for (const CMatrix& v : cur) s = std::max(s, max_abs(v));
        if (s == 0.0) s = 1.0;
        std::vector<CMatrix> c = cur;
        for (CMatrix& v : c) v /= s;
        std::vector<CMatrix> x = c;                  // y-iterate -> sqrt(c)
        std::vector<CMatrix> z(c.size(), id);        // z-iterate -> c^{-1/2}
        bool stage_done = false;
        int step = 0;
        while (total < max_iter) {
            ++step;
            ++total;
            double diff = 0.0;
            double worst_increase = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                CMatrix xn = 0.5 * (x[j] + z[j].llt().solve(id));
                CMatrix zn = 0.5 * (z[j] + x[j].llt().solve(id));
                xn = (xn + xn.adjoint()) * 0.5;
                zn = (zn + zn.adjoint()) * 0.5;
                diff = std::max(diff, max_abs(xn - x[j]));
                if (step >= 2) {
                    const double mu = min_herm_eigenvalue(x[j] - xn);
                    worst_increase = std::min(worst_increase, mu);
                }
                x[j] = std::move(xn);
                z[j] = std::move(zn);
            }
            if (step >= 2 && worst_increase < -psd_slack) out.monotone_psd = false;
            out.final_step = diff;
            if (diff < tol) {
                stage_done = true;
                break;
            }
        }
        const double rs = std::sqrt(s);
        for (CMatrix& v : x) v *= rs;
        cur = std::move(x);
        if (!stage_done) {
            out.converged = false;
            out.iterations = total;
            out.root = m.is_torus() ? Element::from_node_values(m, cur)
                                    : Element::from_matrix(m, cur[0]);
            return out;
        }
    }
    out.converged = true;
    out.iterations = total;
    out.root =
        m.is_torus() ? Element::from_node_values(m, cur) : Element::from_matrix(m, cur[0]);
    return out;
}

namespace {

double structural_defect_A(const Element& x) {
    const AlgebraModel& m = x.model();
    double d = 0.0;
    if (!m.is_torus()) {
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j)
                if (!m.in_upper(i, j)) d = std::max(d, std::abs(x.matrix()(i, j)));
        return d;
    }
    for (const auto& [k, c] : x.coeffs())
        if (k < 0) d = std::max(d, max_abs(c));
    return d;
}

double dual_defect_A(const Element& x) {
    const AlgebraModel& m = x.model();
    double d = 0.0;
    if (!m.is_torus()) {
        // tau(x e_ij) = x_ji / n over the basis {e_ij} of A0
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j)
                if (m.in_strict_upper(i, j))
                    d = std::max(d, std::abs(x.matrix()(j, i)) / m.n);
        return d;
    }
    // tau(x z^k e_ij) = (x^(-k))_ji / n for 1 <= k <= N
    for (int k = 1; k <= m.degree; ++k) {
        const CMatrix c = x.coeff(-k);
        d = std::max(d, max_abs(c) / m.n);
    }
    return d;
}

double structural_defect_D(const Element& x) {
    const AlgebraModel& m = x.model();
    double d = 0.0;
    if (!m.is_torus()) {
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j)
                if (!m.in_diagonal(i, j)) d = std::max(d, std::abs(x.matrix()(i, j)));
        return d;
    }
    for (const auto& [k, c] : x.coeffs())
        if (k != 0) d = std::max(d, max_abs(c));
    return d;
}

}  // namespace

MembershipReport in_A(const Element& x, MembershipMode mode, double tol) {
    if (tol < 0) tol = x.model().default_tol();
    const double d = mode == MembershipMode::Structural ? structural_defect_A(x) : dual_defect_A(x);
    return {d <= tol, d};
}

MembershipReport in_A0(const Element& x, MembershipMode mode, double tol) {
    if (tol < 0) tol = x.model().default_tol();
    const MembershipReport base = in_A(x, mode, tol);
    const double d = std::max(base.defect, phi(x).sup_abs());
    return {d <= tol, d};
}

MembershipReport in_D(const Element& x, MembershipMode mode, double tol) {
    if (tol < 0) tol = x.model().default_tol();
    double d;
    if (mode == MembershipMode::Structural) {
        d = structural_defect_D(x);
    } else {
        d = std::max(dual_defect_A(x), dual_defect_A(x.adjoint()));
    }
    return {d <= tol, d};
}

Element random_element(const AlgebraModel& m, ElementClass cls, std::uint64_t seed) {
    m.validate();
    Rng rng(seed);
    const int n = m.n;

    if (!m.is_torus()) {
        auto gaussian = [&]() {
            CMatrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
            return g;
        };
        switch (cls) {
            case ElementClass::M:
                return Element::from_matrix(m, gaussian());
            case ElementClass::A: {
                CMatrix g = gaussian();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (!m.in_upper(i, j)) g(i, j) = 0.0;
                return Element::from_matrix(m, g);
            }
            case ElementClass::A0: {
                CMatrix g = gaussian();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (!m.in_strict_upper(i, j)) g(i, j) = 0.0;
                return Element::from_matrix(m, g);
            }
            case ElementClass::D: {
                CMatrix g = gaussian();
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (!m.in_diagonal(i, j)) g(i, j) = 0.0;
                return Element::from_matrix(m, g);
            }
            case ElementClass::PositiveInvertible: {
                Eigen::HouseholderQR<CMatrix> qr(gaussian());
                const CMatrix q = qr.householderQ();
                Eigen::VectorXd lam(n);
                // log-uniform spectrum in [0.1, 10]: condition <= 100
                for (int i = 0; i < n; ++i)
                    lam[i] = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
                CMatrix w = q * lam.cast<Complex>().asDiagonal() * q.adjoint();
                w = (w + w.adjoint()) * 0.5;
                return Element::from_matrix(m, w);
            }
        }
    }

    const int N = m.degree;
    auto gaussian_coeffs = [&](int klo, int khi) {
        std::map<int, CMatrix> c;
        const double s = 1.0 / std::sqrt(static_cast<double>(khi - klo + 1));
        for (int k = klo; k <= khi; ++k) {
            CMatrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal() * s;
            c[k] = g;
        }
        return c;
    };
    switch (cls) {
        case ElementClass::M:
            return Element::from_coeffs(m, gaussian_coeffs(-N, N));
        case ElementClass::A:
            return Element::from_coeffs(m, gaussian_coeffs(0, N));
        case ElementClass::A0:
            if (N == 0) return Element::zero(m);
            return Element::from_coeffs(m, gaussian_coeffs(1, N));
        case ElementClass::D:
            return Element::from_coeffs(m, gaussian_coeffs(0, 0));
        case ElementClass::PositiveInvertible: {
            // g* g + shift, with g of half degree so the result stays within N
            const Element g = Element::from_coeffs(m, gaussian_coeffs(0, N / 2));
            Element w = g.adjoint() * g;
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const CMatrix& v : w.node_values()) {
                Eigen::SelfAdjointEigenSolver<CMatrix> es((v + v.adjoint()) * 0.5);
                lo = std::min(lo, es.eigenvalues().minCoeff());
                hi = std::max(hi, es.eigenvalues().maxCoeff());
            }
            // shift so the node condition number stays below 100
            const double shift = std::max(0.0, (hi - 100.0 * lo) / 99.0) + 1e-6 * std::max(hi, 1.0);
            return w + Element::identity(m) * Complex(shift, 0.0);
        }
    }
    throw std::logic_error("random_element: unreachable");
}

}  // namespace nchardy
