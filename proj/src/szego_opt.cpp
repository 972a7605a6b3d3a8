#include "nchardy/szego_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nchardy/rng.hpp"

namespace nchardy {

namespace {

void require_psd(const Element& w, const char* who) {
    const double scale = std::max(1.0, w.sup_abs());
    if ((w - w.adjoint()).sup_abs() > 1e-9 * scale)
        throw std::invalid_argument(std::string(who) + ": w is not Hermitian");
    for (const CMatrix& v : w.node_values()) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es((v + v.adjoint()) * 0.5);
        if (es.eigenvalues().minCoeff() < -1e-9 * scale)
            throw std::invalid_argument(std::string(who) + ": w is not positive semidefinite");
    }
}

/// tau(w |a|^p) from node values of w and a.
double objective_nodes(const std::vector<CMatrix>& wv, const std::vector<CMatrix>& av, double p,
                       int n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < wv.size(); ++j) {
        const CMatrix ap = hermitian_power(av[j].adjoint() * av[j], p / 2.0);
        acc += (wv[j] * ap).trace().real() / n;
    }
    return acc / static_cast<double>(wv.size());
}

/// Optimization variables: strictly upper-triangular complex entries of every
/// coefficient that meets A, plus a log-parameterized positive diagonal of
/// Phi(a) with zero log-sum (the constraint Delta(Phi(a)) >= 1 held active).
struct Parameterization {
    const AlgebraModel* model;
    int dim = 0;

    explicit Parameterization(const AlgebraModel& m) : model(&m) {
        const int n = m.n;
        if (!m.is_torus())
            dim = (n - 1) + n * (n - 1);  // logs + complex strict upper
        else
            dim = (n - 1) + n * (n - 1) + 2 * n * n * m.degree;
    }

    Element unpack(const Eigen::VectorXd& x) const {
        const AlgebraModel& m = *model;
        const int n = m.n;
        int at = 0;
        Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
        for (int i = 0; i + 1 < n; ++i) t[i] = x[at++];
        t[n - 1] = -t.head(n - 1).sum();
        CMatrix d0 = CMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) d0(i, i) = std::exp(t[i]);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                d0(i, j) = Complex(x[at], x[at + 1]);
                at += 2;
            }
        if (!m.is_torus()) return Element::from_matrix(m, d0);
        std::map<int, CMatrix> c;
        c[0] = d0;
        for (int k = 1; k <= m.degree; ++k) {
            CMatrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    g(i, j) = Complex(x[at], x[at + 1]);
                    at += 2;
                }
            c[k] = g;
        }
        return Element::from_coeffs(m, std::move(c));
    }
};

}  // namespace

std::pair<double, Element> closed_form_p2(const Element& w) {
    const AlgebraModel& m = w.model();
    if (m.is_torus()) throw std::invalid_argument("closed_form_p2: MatrixBlock model required");
    for (int b : m.blocks)
        if (b != 1)
            throw std::invalid_argument("closed_form_p2: fully triangular flag required");
    require_psd(w, "closed_form_p2");
    const int n = m.n;
    const CMatrix& W = w.matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> es((W + W.adjoint()) * 0.5);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("closed_form_p2: w must be positive definite");

    // upper-triangular factor w = c c* via the reversed Cholesky
    CMatrix rev(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rev(i, j) = W(n - 1 - i, n - 1 - j);
    const CMatrix L = CMatrix(rev.llt().matrixL());
    CMatrix c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = L(n - 1 - i, n - 1 - j);

    double log_g = 0.0;  // g = (prod c_ii)^{1/n}
    for (int i = 0; i < n; ++i) log_g += std::log(c(i, i).real()) / n;
    const double g = std::exp(log_g);
    const double value = g * g;  // = (det w)^{1/n}

    const CMatrix cinv = c.triangularView<Eigen::Upper>().solve(CMatrix::Identity(n, n));
    return {value, Element::from_matrix(m, g * cinv)};
}

SzegoReport szego_infimum(const Element& w, double p, int budget, std::uint64_t seed, int starts) {
    if (!(p > 0.0)) throw std::invalid_argument("szego_infimum: p must be positive");
    if (budget < 1 || starts < 1) throw std::invalid_argument("szego_infimum: bad budget/starts");
    require_psd(w, "szego_infimum");
    const AlgebraModel& m = w.model();
    const std::vector<CMatrix> wv = w.node_values();
    const Parameterization par(m);

    auto f = [&](const Eigen::VectorXd& x) {
        return objective_nodes(wv, par.unpack(x).node_values(), p, m.n);
    };

    Eigen::VectorXd best_x = Eigen::VectorXd::Zero(par.dim);
    double best_f = f(best_x);
    int total_iter = 0;

    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(par.dim);
        if (s > 0) {
            Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(s)));
            for (int i = 0; i < par.dim; ++i) x[i] = 0.3 * rng.normal();
        }
        double fx = f(x);
        double step = 0.1;
        const double fd = 1e-6;  // finite-difference step
        for (int it = 0; it < budget; ++it) {
            ++total_iter;
            Eigen::VectorXd g(par.dim);
            for (int d = 0; d < par.dim; ++d) {
                Eigen::VectorXd xp = x, xm = x;
                xp[d] += fd;
                xm[d] -= fd;
                g[d] = (f(xp) - f(xm)) / (2.0 * fd);
            }
            const double gn = g.norm();
            if (gn < 1e-10) break;
            bool moved = false;
            while (step > 1e-14) {
                const Eigen::VectorXd xn = x - step * g;
                const double fn = f(xn);
                if (fn < fx - 0.1 * step * gn * gn) {
                    x = xn;
                    fx = fn;
                    step *= 1.3;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }

    SzegoReport rep;
    rep.p = p;
    rep.det_w = fk_det(w).value;
    rep.inf_estimate = best_f;
    rep.iterations = total_iter;
    rep.minimizer = par.unpack(best_x);
    rep.relative_gap = (rep.inf_estimate - rep.det_w) /
                       std::max(rep.det_w, kSigmaFloorRatio * std::max(sigma_max(w), 1e-300));
    rep.constraint_residual = std::abs(fk_det(phi(rep.minimizer)).value - 1.0);
    if (p == 2.0 && !m.is_torus() &&
        std::all_of(m.blocks.begin(), m.blocks.end(), [](int b) { return b == 1; })) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(
            (w.matrix() + w.matrix().adjoint()) * 0.5);
        if (es.eigenvalues().minCoeff() > 0.0) rep.oracle_value = closed_form_p2(w).first;
    }
    return rep;
}

double brute_force_infimum(const Element& w, double p, int samples, std::uint64_t seed) {
    if (!(p > 0.0)) throw std::invalid_argument("brute_force_infimum: p must be positive");
    if (samples < 1) throw std::invalid_argument("brute_force_infimum: samples must be >= 1");
    require_psd(w, "brute_force_infimum");
    const AlgebraModel& m = w.model();
    const std::vector<CMatrix> wv = w.node_values();
    const int n = m.n;
    Rng rng(seed);

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        // fixed draw count per sample keeps prefixes seed-stable
        Element a;
        if (!m.is_torus()) {
            CMatrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const Complex v = rng.cnormal();
                    g(i, j) = m.in_upper(i, j) ? v : Complex(0, 0);
                }
            a = Element::from_matrix(m, g);
        } else {
            std::map<int, CMatrix> c;
            for (int k = 0; k <= m.degree; ++k) {
                CMatrix g(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
                c[k] = g;
            }
            a = Element::from_coeffs(m, std::move(c));
        }
        const double d = fk_det(phi(a)).value;
        if (d < 1e-12) continue;
        a = a * Complex(1.0 / d, 0.0);  // rescale to Delta(Phi(a)) = 1
        best = std::min(best, objective_nodes(wv, a.node_values(), p, n));
    }
    return best;
}

}  // namespace nchardy
