#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "inflap/oracles.hpp"

using namespace inflap;

namespace {
bool close(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}
} // namespace

TEST_CASE("oracle construction and sampling") {
    CHECK_THROWS_AS(OracleField::aronsson(1.0, -0.5), InvalidParameterError);
    CHECK_THROWS_AS(OracleField::radial_monomial(-1.0, 2.0), InvalidParameterError);
    CHECK_THROWS_AS(OracleField::radial_monomial(1.0, 1.0), InvalidParameterError);

    const OracleField ar = OracleField::aronsson(1.0, -1.0);
    CHECK(close(ar.eval({1.0, 1.0}), 0.0));
    CHECK(close(ar.eval({1.0, 0.0}), 1.0));

    const OracleField rad = OracleField::radial_monomial(1.0, 4.0 / 3.0);
    CHECK(close(rad.eval({0.3, 0.4}), std::pow(0.5, 4.0 / 3.0)));

    const OracleField aff = OracleField::affine({2.0, 0.0}, 1.0);
    CHECK(close(aff.eval({0.5, 0.3}), 2.0));

    const Grid2D g = build_grid(17, 1.0);
    const ScalarField f = sample(ar, g);
    CHECK(f.role == FieldRole::oracle);
    CHECK(close(f.at(g.n - 1, g.n - 1), 0.0));
    CHECK(f.all_finite());
}

TEST_CASE("analytic infinity-Laplacian values") {
    const OracleField rad = OracleField::radial_monomial(1.0, 2.0);
    CHECK(close(analytic_inf_laplacian(rad, {0.5, 0.0}), 2.0)); // 8 r^2

    const OracleField ar = OracleField::aronsson(1.0, -1.0);
    CHECK(analytic_inf_laplacian(ar, {0.3, 0.8}) == 0.0);
    CHECK_THROWS_AS(analytic_inf_laplacian(ar, {0.0, 0.5}), SingularPointError);

    const OracleField cone = OracleField::cone({0.1, 0.1});
    CHECK(analytic_inf_laplacian(cone, {0.5, 0.5}) == 0.0);
    CHECK_THROWS_AS(analytic_inf_laplacian(cone, {0.1, 0.1}), SingularPointError);
}

TEST_CASE("radial oracle solves its paired dead-core equation") {
    // K r^sigma with the matched constant: analytic operator equals
    // lambda u^gamma on the trace, at random radii
    const RadialConstant rc = deadcore_radial_constant(1.0, 1.0, 0.0);
    const OracleField rad = OracleField::radial_monomial(rc.K, rc.sigma);
    const RhsModel dc = RhsModel::dead_core(1.0, 1.0);
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> ur(0.01, 1.4), ua(0.0, 2.0 * M_PI);
    for (int i = 0; i < 100; ++i) {
        const double r = ur(rng), a = ua(rng);
        const Vec2 x{r * std::cos(a), r * std::sin(a)};
        const double lhs = analytic_inf_laplacian(rad, x);
        const double rhs = evaluate_rhs(dc, x, rad.eval(x), 1.0);
        CHECK(close(lhs, rhs));
    }
}

TEST_CASE("refinement study on affine oracles is scheme-exact") {
    const OracleField aff = OracleField::affine({1.5, -0.5}, 0.25);
    const StencilSet s = build_stencil(2);
    const auto rows = refinement_study(aff, RhsModel::zero(), {17, 33, 65}, 1.0, s,
                                       OperatorKind::direct(), false);
    REQUIRE(rows.size() == 3);
    for (const RefinementRow& r : rows) {
        CHECK(r.sup_residual <= 1e-10);
        CHECK(std::isnan(r.sup_error));
    }
    CHECK(rows[0].h > rows[1].h);
    CHECK(rows[1].h > rows[2].h);
}

TEST_CASE("refinement study validates its grid list") {
    const OracleField aff = OracleField::affine({1.0, 0.0}, 0.0);
    const StencilSet s = build_stencil(1);
    CHECK_THROWS_AS(refinement_study(aff, RhsModel::zero(), {17, 33}, 1.0, s,
                                     OperatorKind::direct(), false),
                    InvalidParameterError);
    CHECK_THROWS_AS(refinement_study(aff, RhsModel::zero(), {33, 33, 65}, 1.0, s,
                                     OperatorKind::direct(), false),
                    InvalidParameterError);
}

TEST_CASE("refinement tables never sample inside the singular collar") {
    const OracleField ar = OracleField::aronsson(1.0, -1.0);
    const StencilSet s = build_stencil(2);
    const auto rows = refinement_study(ar, RhsModel::zero(), {17, 33, 65}, 1.0, s,
                                       OperatorKind::direct(), false);
    for (const RefinementRow& r : rows)
        CHECK(r.min_sample_singular_dist >= 2.0 * s.width * r.h);
}

TEST_CASE("operator consistency improves under refinement on smooth radials") {
    // residual of the full dead-core equation on the exact radial solution
    const RadialConstant rc = deadcore_radial_constant(8.0, 1.0, 0.0);
    const OracleField rad = OracleField::radial_monomial(rc.K, rc.sigma);
    const RhsModel dc = RhsModel::dead_core(8.0, 1.0);
    const StencilSet s = build_stencil(2);
    const auto rows = refinement_study(rad, dc, {33, 65, 129}, 1.0, s,
                                       OperatorKind::direct(), false);
    // analytic operator equals the rhs on this field, so sup_residual
    // doubles as the full-equation defect; it must shrink with h
    CHECK(rows[1].sup_residual < rows[0].sup_residual);
    CHECK(rows[2].sup_residual < rows[1].sup_residual);
}
