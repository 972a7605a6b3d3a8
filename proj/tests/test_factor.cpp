#include <doctest.h>

#include <cmath>

#include "nchardy/factor.hpp"
#include "oracles.hpp"

using namespace nchardy;
using oracle::mat2;
using oracle::scalar_poly;

namespace {
const AlgebraModel kM2 = AlgebraModel::matrix_block({1, 1});
const AlgebraModel kM112 = AlgebraModel::matrix_block({1, 1, 2});
const AlgebraModel kTS = AlgebraModel::torus_scalar(8);  // K = 33

Element invertible_in_A(const AlgebraModel& m, std::uint64_t seed) {
    return random_element(m, ElementClass::A, seed) + Element::identity(m) * Complex(2.0, 0.0);
}
}  // namespace

TEST_CASE("arveson_factor") {
    const auto id = arveson_factor(Element::identity(kM112));
    CHECK(id.unitary.approx_equal(Element::identity(kM112), 1e-12));
    CHECK(id.analytic.approx_equal(Element::identity(kM112), 1e-12));

    // QR of a unitary: positive-diagonal convention forces a = 1
    const Element u = Element::from_matrix(kM112, oracle::random_unitary(4, 3));
    CHECK(arveson_factor(u).analytic.approx_equal(Element::identity(kM112), 1e-12));

    for (int t = 0; t < 50; ++t) {
        const Element x = random_element(kM112, ElementClass::M, 3000 + t);
        if (sigma_min(x) < 1e-6 * sigma_max(x)) continue;
        const auto f = arveson_factor(x);
        CHECK(f.residuals.reconstruction < 1e-10);
        CHECK(f.residuals.unitarity < 1e-10);
        CHECK(f.residuals.membership == 0.0);
        REQUIRE(f.analytic_inverse.has_value());
        CHECK(f.residuals.inverse_membership == 0.0);
        CHECK((f.analytic * *f.analytic_inverse - Element::identity(kM112)).sup_abs() < 1e-10);
        for (int i = 0; i < 4; ++i) {
            CHECK(f.analytic.matrix()(i, i).imag() == 0.0);
            CHECK(f.analytic.matrix()(i, i).real() > 0.0);
        }
    }

    CHECK_THROWS_AS(arveson_factor(Element::from_matrix(kM2, mat2(1, 1, 1, 1))),
                    std::domain_error);
    CHECK_THROWS_AS(arveson_factor(Element::identity(kTS)), std::invalid_argument);
}

TEST_CASE("szego_factor_projection") {
    const AlgebraModel m3 = AlgebraModel::matrix_block({1, 1, 1});
    {
        const auto [res, cert] = szego_factor_projection(Element::identity(m3));
        CHECK(res.analytic.approx_equal(Element::identity(m3), 1e-12));
        CHECK(res.unitary.approx_equal(Element::identity(m3), 1e-12));
        CHECK(cert.modulus_in_D < 1e-12);
    }
    {
        // positive diagonal w: wA0 is orthogonal to w, so y = w, u = 1, h = w
        CMatrix d = CMatrix::Zero(3, 3);
        d(0, 0) = 2.0;
        d(1, 1) = 0.5;
        d(2, 2) = 1.5;
        const Element w = Element::from_matrix(m3, d);
        const auto [res, cert] = szego_factor_projection(w);
        CHECK(res.unitary.approx_equal(Element::identity(m3), 1e-10));
        CHECK(res.analytic.approx_equal(w, 1e-10));
    }
    for (int t = 0; t < 30; ++t) {
        const Element w = random_element(m3, ElementClass::M, 3100 + t);
        if (sigma_min(w) < 1e-6 * sigma_max(w)) continue;
        const auto [res, cert] = szego_factor_projection(w);
        CHECK(cert.modulus_in_D < 1e-8);
        CHECK(cert.orthogonality < 1e-8);
        CHECK(cert.phi_product < 1e-8);
        CHECK(cert.y_full_support);
        CHECK_FALSE(cert.gram_ill_conditioned);
        CHECK(res.residuals.reconstruction < 1e-8);
        CHECK(res.residuals.membership < 1e-8);
        CHECK(res.residuals.inverse_membership < 1e-8);
        // Remark 3.3: the computed factor generates H^2
        CHECK(subspace_rank(res.analytic, Side::Left) == m3.dim_A());
    }
    CHECK_THROWS_AS(szego_factor_projection(Element::from_matrix(m3, CMatrix::Zero(3, 3))),
                    std::domain_error);
}

TEST_CASE("outer_factor_scalar golden cases") {
    {
        const ScalarOuterResult r = outer_factor_scalar(Element::identity(kTS));
        CHECK(r.outer.approx_equal(Element::identity(kTS), 1e-10));
    }
    {
        // w = |1 - e^{it}/2|^2 -> h = (1 - z/2)^2, Delta(w) = 1
        const Element w = scalar_poly(kTS, {-0.5, 1.25, -0.5}, -1);
        const ScalarOuterResult r = outer_factor_scalar(w);
        CHECK(std::abs(r.outer.coeff(0)(0, 0) - Complex(1, 0)) < 1e-8);
        CHECK(std::abs(r.outer.coeff(1)(0, 0) - Complex(-1, 0)) < 1e-8);
        CHECK(std::abs(r.outer.coeff(2)(0, 0) - Complex(0.25, 0)) < 1e-8);
        CHECK(std::abs(fk_det(w).value - 1.0) < 1e-8);
        CHECK(r.modulus_residual < 1e-6);
        CHECK(r.negative_defect < 1e-8);
        CHECK(r.det_certificate_gap < 1e-6);
        CHECK(in_A(r.outer).defect == 0.0);
    }
    {
        // boundary zero: w = 2 + 2 cos t -> h = (1 + z)^2 (stress case)
        const Element w = scalar_poly(kTS, {1, 2, 1}, -1);
        const ScalarOuterResult r = outer_factor_scalar(w);
        CHECK(std::abs(r.outer.coeff(0)(0, 0) - Complex(1, 0)) < 1e-4);
        CHECK(std::abs(r.outer.coeff(1)(0, 0) - Complex(2, 0)) < 1e-4);
        CHECK(std::abs(r.outer.coeff(2)(0, 0) - Complex(1, 0)) < 1e-4);
        CHECK(r.det_certificate_gap < 1e-6);
    }
    // negative symbol rejected
    CHECK_THROWS_AS(outer_factor_scalar(scalar_poly(kTS, {-1.0})), std::domain_error);
    // zero determinant rejected
    CHECK_THROWS_AS(outer_factor_scalar(Element::zero(kTS)), std::domain_error);
    CHECK_THROWS_AS(outer_factor_scalar(Element::identity(kM2)), std::invalid_argument);
}

TEST_CASE("wilson_factor") {
    const AlgebraModel m = AlgebraModel::torus_matrix(2, 4);
    {
        const WilsonResult r = wilson_factor(Element::identity(m));
        CHECK(r.converged);
        CHECK(r.factor.approx_equal(Element::identity(m), 1e-10));
    }
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + t % 2;
        const AlgebraModel mm = AlgebraModel::torus_matrix(n, 2 + t % 3);
        const Element q = random_element(mm, ElementClass::A, 3200 + t) +
                          Element::identity(mm) * Complex(2.5, 0.0);
        const Element w = q.adjoint() * q;
        const WilsonResult r = wilson_factor(w);
        CHECK(r.converged);
        CHECK(r.sup_residual < 1e-8);
        CHECK(r.det_certificate_gap < 1e-6);
        CHECK(in_A(r.factor).defect == 0.0);
        // residual trace decays to convergence
        REQUIRE(r.residual_trace.size() >= 2);
        CHECK(r.residual_trace.back() < r.residual_trace.front());
    }
    // not uniformly positive: rejected with the minimal node eigenvalue
    {
        std::map<int, CMatrix> c;
        c[0] = mat2(1, 0, 0, 1);
        c[1] = mat2(1, 0, 0, 1);
        c[-1] = mat2(1, 0, 0, 1);  // 1 + 2cos t: negative near pi
        CHECK_THROWS_AS(wilson_factor(Element::from_coeffs(m, c)), std::domain_error);
    }
    CHECK_THROWS_AS(wilson_factor(random_element(m, ElementClass::A, 1)),
                    std::invalid_argument);  // not Hermitian
}

TEST_CASE("szego_factor: identity, uniqueness against projection, splitting") {
    const AlgebraModel m3 = AlgebraModel::matrix_block({1, 1, 1});
    {
        const auto f = szego_factor(Element::identity(m3), 2.0, 2.0);
        CHECK(f.unitary.approx_equal(Element::identity(m3), 1e-12));
        CHECK(f.analytic.approx_equal(Element::identity(m3), 1e-12));
    }
    for (int t = 0; t < 10; ++t) {
        const Element w = random_element(m3, ElementClass::PositiveInvertible, 3300 + t);
        const auto f1 = szego_factor(w, 2.0, 2.0);
        const auto [f2, cert] = szego_factor_projection(w);
        // uniqueness up to a block-diagonal unitary: h1 h2^{-1} lies in D
        const Element mix = f1.analytic * *f2.analytic_inverse;
        CHECK(in_D(mix, MembershipMode::Structural, 1e-8 * std::max(1.0, mix.sup_abs())).member);
    }
    for (int t = 0; t < 10; ++t) {
        // p = q = 1/2 exercises the four-fold splitting of the proof
        const Element w = random_element(kM112, ElementClass::M, 3400 + t);
        if (sigma_min(w) < 1e-6 * sigma_max(w)) continue;
        const auto f = szego_factor(w, 0.5, 0.5);
        CHECK(f.residuals.reconstruction < 1e-8);
        CHECK(f.residuals.unitarity < 1e-8);
        CHECK(f.residuals.membership < 1e-8);
        REQUIRE(f.analytic_inverse.has_value());
        CHECK(f.residuals.inverse_membership < 1e-8);
    }
    // torus: analytic invertible polynomial has a constant unitary factor
    {
        const AlgebraModel tm = AlgebraModel::torus_matrix(2, 3);
        const Element w = invertible_in_A(tm, 3500);
        const auto f = szego_factor(w, 2.0, 2.0);
        CHECK(f.residuals.reconstruction < 1e-8);
        CHECK(f.residuals.unitarity < 1e-8);
        CHECK(f.residuals.membership < 1e-9);
        const Element u0 = phi(f.unitary);
        CHECK((f.unitary - u0).sup_abs() < 1e-8);  // constant
    }
    CHECK_THROWS_AS(szego_factor(Element::identity(m3), -1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(szego_factor(Element::from_matrix(m3, CMatrix::Zero(3, 3)), 2.0, 2.0),
                    std::domain_error);
}

TEST_CASE("riesz_factor") {
    {
        // identity splits into scaled constants; the bound holds trivially
        const RieszResult r = riesz_factor(Element::identity(kM112), 2.0, 2.0, 1e-2);
        CHECK(r.reconstruction < 1e-12);
        CHECK(r.bound_slack <= 1e-8);
    }
    {
        // coordinate function on the scalar torus, p = 1, q = r = 2
        const AlgebraModel ts = AlgebraModel::torus_scalar(4);
        const Element z = scalar_poly(ts, {0, 1});
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            const RieszResult r = riesz_factor(z, 2.0, 2.0, eps);
            CHECK(r.reconstruction < 1e-8);
            CHECK(r.bound_slack <= 1e-8);
            CHECK(r.membership_y < 1e-8);
            CHECK(r.membership_z < 1e-8);
        }
    }
    for (int t = 0; t < 15; ++t) {
        const Element x = random_element(kM112, ElementClass::A, 3600 + t);
        for (auto [q, r2] : std::vector<std::pair<double, double>>{{2, 2}, {1, 1}, {1, 2}}) {
            for (double eps : {1e-1, 1e-2, 1e-3}) {
                const RieszResult r = riesz_factor(x, q, r2, eps);
                CHECK(r.reconstruction < 1e-8);
                CHECK(r.membership_y < 1e-8);
                CHECK(r.membership_z < 1e-8);
                CHECK(r.bound_slack <= 1e-8);
            }
        }
    }
    // attained equality via the inner-outer pathway when Delta(x) > 0
    for (int t = 0; t < 15; ++t) {
        const Element x = invertible_in_A(kM112, 3700 + t);
        const RieszResult r = riesz_factor_attained(x, 2.0, 2.0);
        CHECK(r.attained);
        CHECK(r.reconstruction < 1e-8);
        CHECK(std::abs(r.norm_y * r.norm_z - r.norm_x) < 1e-6 * r.norm_x);
    }
    // membership failure of the input
    CHECK_THROWS_AS(riesz_factor(Element::from_matrix(kM2, mat2(0, 0, 1, 0)), 2, 2, 1e-2),
                    std::domain_error);
    CHECK_THROWS_AS(riesz_factor(Element::identity(kM2), 2, -2, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(riesz_factor_attained(Element::from_matrix(kM2, mat2(1, 0, 0, 0)), 2, 2),
                    std::domain_error);
}

TEST_CASE("inner_outer") {
    {
        // already outer with the positive-diagonal convention: inner = 1
        const Element h = arveson_factor(invertible_in_A(kM112, 4000)).analytic;
        const InnerOuterResult io = inner_outer(h);
        CHECK(io.inner.approx_equal(Element::identity(kM112), 1e-10));
        CHECK(io.outer.approx_equal(h, 1e-10));
    }
    {
        // x = u0 h with u0 a block-diagonal unitary: recovered up to D-phase
        const Element h = invertible_in_A(kM112, 4001);
        const Element d = random_element(kM112, ElementClass::D, 4002) +
                          Element::identity(kM112) * Complex(3.0, 0.0);
        const Element u0 = polar(d).unitary_part;
        const Element x = u0 * h;
        const InnerOuterResult io = inner_outer(x);
        CHECK(io.reconstruction < 1e-8);
        CHECK(io.inner_unitarity < 1e-8);
        CHECK(io.inner_membership < 1e-8);
        CHECK(is_outer(io.outer).left);
        const Element mix = io.outer * Element::from_matrix(kM112, h.matrix().inverse());
        CHECK(in_D(mix, MembershipMode::Structural, 1e-8 * std::max(1.0, mix.sup_abs())).member);
    }
    {
        // scalar torus: x = z g with g outer pulls out the coordinate inner
        const AlgebraModel ts = AlgebraModel::torus_scalar(8);
        const Element g = scalar_poly(ts, {1, -1, 0.25});  // (1 - z/2)^2
        const Element x = scalar_poly(ts, {0, 1}) * g;
        const InnerOuterResult io = inner_outer(x);
        CHECK((io.outer - g).sup_abs() < 1e-6);
        CHECK(std::abs(io.inner.coeff(1)(0, 0) - Complex(1, 0)) < 1e-6);
        CHECK(io.reconstruction < 1e-6);
        CHECK(io.inner_unitarity < 1e-6);
    }
    {
        // torus matrix route
        const AlgebraModel tm = AlgebraModel::torus_matrix(2, 3);
        const Element x = invertible_in_A(tm, 4003);
        const InnerOuterResult io = inner_outer(x);
        CHECK(io.reconstruction < 1e-8);
        CHECK(io.inner_unitarity < 1e-8);
    }
    CHECK_THROWS_WITH_AS(inner_outer(Element::from_matrix(kM2, mat2(1, 0, 0, 0))),
                         doctest::Contains("full support"), std::domain_error);
}

TEST_CASE("subspace_rank") {
    const AlgebraModel m = AlgebraModel::matrix_block({1, 1});
    CHECK(subspace_rank(Element::identity(m), Side::Left) == m.dim_A());
    CHECK(subspace_rank(Element::zero(m), Side::Left) == 0);
    CHECK(subspace_rank(Element::from_matrix(m, mat2(1, 0, 0, 0)), Side::Left) == 2);
    CHECK(subspace_rank(Element::identity(m), Side::Bilateral) == m.dim_A());
    CHECK_THROWS_AS(subspace_rank(Element::identity(kTS), Side::Left), std::invalid_argument);
}

TEST_CASE("is_outer: matrix-model verdicts") {
    {
        // degenerate model A = M: matrix units are bilaterally outer
        const AlgebraModel deg = AlgebraModel::matrix_block({3});
        CMatrix e12 = CMatrix::Zero(3, 3);
        e12(0, 1) = 1.0;
        const OuterReport rep = is_outer(Element::from_matrix(deg, e12));
        CHECK(rep.bilateral);
        CHECK_FALSE(rep.left);
        CHECK_FALSE(rep.right);
        CHECK(rep.rank_bilateral == 9);
        CHECK(rep.det_h == 0.0);
    }
    {
        // invertible h in A with inverse in A is outer
        const OuterReport rep = is_outer(invertible_in_A(kM112, 4100));
        CHECK(rep.left);
        CHECK(rep.right);
        CHECK(rep.bilateral);
        CHECK(rep.det_criterion);
        CHECK(rep.det_h == doctest::Approx(rep.det_phi_h).epsilon(1e-10));
    }
    {
        const OuterReport rep = is_outer(Element::from_matrix(kM2, mat2(0, 0, 0, 1)));
        CHECK_FALSE(rep.left);
        CHECK_FALSE(rep.right);
        CHECK_FALSE(rep.bilateral);
        CHECK(rep.det_h == 0.0);
        CHECK(rep.rank_left == 1);  // hA = span{e22}
        CHECK(rep.rank_right == 2);
    }
    // criterion vs rank oracle on mixed samples
    for (int t = 0; t < 60; ++t) {
        Element h = random_element(kM112, ElementClass::A, 4200 + t);
        if (t % 3 == 0) {
            CMatrix v = h.matrix();
            v.row(t % 4).setZero();
            v.col(t % 4).setZero();
            h = Element::from_matrix(kM112, v);
        }
        const OuterReport rep = is_outer(h);
        CHECK(rep.det_criterion == (rep.left && rep.right));
    }
}

TEST_CASE("is_outer: torus counterexample pattern") {
    // h = phi1 (x) e11 + z phi2 (x) e22: bilateral, not left/right,
    // Delta(h) > 0 while Delta(Phi(h)) = 0
    const AlgebraModel m = AlgebraModel::torus_matrix(2, 12);
    std::map<int, CMatrix> c;
    c[0] = mat2(1, 0, 0, 0);
    c[1] = mat2(-0.25, 0, 0, 1);
    c[2] = mat2(0, 0, 0, -0.2);
    const Element h = Element::from_coeffs(m, c);
    const OuterReport rep = is_outer(h);
    CHECK(rep.bilateral);
    CHECK_FALSE(rep.left);
    CHECK_FALSE(rep.right);
    CHECK(rep.det_h == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.det_phi_h == 0.0);
    CHECK_FALSE(rep.rank_oracle_exact);
    CHECK(rep.dist_bilateral < 1e-6);
    CHECK(rep.dist_left > 0.5);

    // phi (x) e12 is bilaterally outer in the torus model (Remark 4.3 shape)
    std::map<int, CMatrix> c2;
    c2[0] = mat2(0, 1, 0, 0);
    c2[1] = mat2(0, -0.25, 0, 0);
    const OuterReport rep2 = is_outer(Element::from_coeffs(m, c2));
    CHECK(rep2.bilateral);
    CHECK_FALSE(rep2.left);

    // the coordinate inner z is not outer
    const AlgebraModel ts = AlgebraModel::torus_scalar(10);
    const OuterReport rz = is_outer(scalar_poly(ts, {0, 1}));
    CHECK_FALSE(rz.left);
    CHECK_FALSE(rz.bilateral);
    // an invertible-outer scalar is recognized
    const OuterReport rg = is_outer(scalar_poly(ts, {1, -0.25}));
    CHECK(rg.left);
    CHECK(rg.right);
    CHECK(rg.bilateral);
}

TEST_CASE("outer maximizes Delta(Phi(.)) among equal-modulus elements") {
    for (int t = 0; t < 30; ++t) {
        const Element h = invertible_in_A(kM112, 4300 + t);
        const double dh = fk_det(phi(h)).value;
        const Element d = random_element(kM112, ElementClass::D, 4400 + t) +
                          Element::identity(kM112) * Complex(3.0, 0.0);
        const Element x = polar(d).unitary_part * h;
        CHECK(fk_det(phi(x)).value <= dh * (1 + 1e-8));
    }
}
