#pragma once

#include <cmath>
#include <vector>

#include "inflap/solver.hpp"

namespace inflap {

enum class OracleKind { aronsson, radial_monomial, affine, cone };

/// Closed-form reference fields: the Aronsson sign-balanced solution
/// a1|x1|^{4/3} + a2|x2|^{4/3} with a1^3 + a2^3 = 0, radial monomials
/// K r^sigma, affine planes, and the cone |x - c|.
struct OracleField {
    OracleKind kind = OracleKind::affine;
    double a1 = 0.0, a2 = 0.0;   // aronsson
    double K = 0.0, sigma = 0.0; // radial
    Vec2 center{};               // radial / cone
    Vec2 p{};                    // affine slope
    double c = 0.0;              // affine offset

    static OracleField aronsson(double a1, double a2) {
        if (std::abs(a1 * a1 * a1 + a2 * a2 * a2) > 1e-12)
            throw InvalidParameterError("aronsson: coefficients must satisfy sum a_i^3 = 0");
        OracleField o;
        o.kind = OracleKind::aronsson;
        o.a1 = a1;
        o.a2 = a2;
        return o;
    }

    static OracleField radial_monomial(double K, double sigma, Vec2 center = {}) {
        if (!(K >= 0.0)) throw InvalidParameterError("radial_monomial: K must be >= 0");
        if (!(sigma > 1.0)) throw InvalidParameterError("radial_monomial: sigma must be > 1");
        OracleField o;
        o.kind = OracleKind::radial_monomial;
        o.K = K;
        o.sigma = sigma;
        o.center = center;
        return o;
    }

    static OracleField affine(Vec2 p, double c) {
        OracleField o;
        o.kind = OracleKind::affine;
        o.p = p;
        o.c = c;
        return o;
    }

    static OracleField cone(Vec2 center) {
        OracleField o;
        o.kind = OracleKind::cone;
        o.center = center;
        return o;
    }

    double eval(Vec2 x) const {
        switch (kind) {
            case OracleKind::aronsson:
                return a1 * std::pow(std::abs(x.x), 4.0 / 3.0) +
                       a2 * std::pow(std::abs(x.y), 4.0 / 3.0);
            case OracleKind::radial_monomial:
                return K * std::pow(norm(x - center), sigma);
            case OracleKind::affine: return dot(p, x) + c;
            case OracleKind::cone: return norm(x - center);
        }
        return 0.0;
    }

    /// Distance from x to the set where the closed form is not C^2
    /// (infinite when the field is smooth everywhere).
    double singular_distance(Vec2 x) const {
        switch (kind) {
            case OracleKind::aronsson:
                return std::min(std::abs(x.x), std::abs(x.y));
            case OracleKind::radial_monomial:
                if (sigma == 2.0 || sigma == 4.0) // plain polynomial in x
                    return std::numeric_limits<double>::infinity();
                return norm(x - center);
            case OracleKind::affine:
                return std::numeric_limits<double>::infinity();
            case OracleKind::cone: return norm(x - center);
        }
        return 0.0;
    }

    BoundaryData boundary() const {
        OracleField self = *this;
        return {[self](Vec2 x) { return self.eval(x); }, "oracle"};
    }
};

/// Node-wise exact evaluation.
inline ScalarField sample(const OracleField& o, const Grid2D& grid,
                          FieldRole role = FieldRole::oracle) {
    ScalarField f(grid, role);
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            f.at(ix, iy) = o.eval(grid.coord(ix, iy));
    return f;
}

/// Exact infinity-Laplacian off the singular set: radial monomials give
/// K^3 sigma^3 (sigma-1) r^{3 sigma - 4}; Aronsson, affine, and cone fields
/// are infinity-harmonic where smooth.
inline double analytic_inf_laplacian(const OracleField& o, Vec2 x) {
    if (o.singular_distance(x) == 0.0)
        throw SingularPointError("analytic_inf_laplacian: point on the singular set");
    switch (o.kind) {
        case OracleKind::radial_monomial: {
            const double r = norm(x - o.center);
            const double K3 = o.K * o.K * o.K;
            return K3 * o.sigma * o.sigma * o.sigma * (o.sigma - 1.0) *
                   std::pow(r, 3.0 * o.sigma - 4.0);
        }
        case OracleKind::aronsson:
        case OracleKind::affine:
        case OracleKind::cone: return 0.0;
    }
    return 0.0;
}

/// Exact |Du| off the singular set.
inline double analytic_gradient_norm(const OracleField& o, Vec2 x) {
    if (o.singular_distance(x) == 0.0)
        throw SingularPointError("analytic_gradient_norm: point on the singular set");
    switch (o.kind) {
        case OracleKind::radial_monomial:
            return o.K * o.sigma * std::pow(norm(x - o.center), o.sigma - 1.0);
        case OracleKind::aronsson: {
            const double gx = o.a1 * (4.0 / 3.0) * std::cbrt(std::abs(x.x));
            const double gy = o.a2 * (4.0 / 3.0) * std::cbrt(std::abs(x.y));
            return std::hypot(gx, gy);
        }
        case OracleKind::affine: return norm(o.p);
        case OracleKind::cone: return 1.0;
    }
    return 0.0;
}

/// Analytic value of the gamma-family member matching an OperatorKind:
/// the direct form divided by |Du|^gamma.
inline double analytic_operator_value(const OracleField& o, Vec2 x, OperatorKind kind) {
    const double direct = analytic_inf_laplacian(o, x);
    const double sg = kind.scheme_gamma();
    if (sg == 0.0) return direct;
    const double gn = analytic_gradient_norm(o, x);
    if (direct == 0.0 && gn > 0.0) return 0.0;
    return direct / std::pow(gn, sg);
}

struct RefinementRow {
    int n = 0;
    double h = 0.0;
    double sup_residual = 0.0; ///< operator consistency vs the closed form
    double sup_error = 0.0;    ///< solve vs oracle (NaN when not solving)
    double min_sample_singular_dist = 0.0;
    int sweeps_used = 0;
};

/// Empirical consistency/convergence table over a strictly refining list of
/// grids. Interior nodes within 2*W*h of the oracle's singular set are
/// excluded from both sups; with solve_mode the oracle supplies the
/// Dirichlet trace and the solver error is measured on the same node set.
inline std::vector<RefinementRow> refinement_study(
    const OracleField& oracle, const RhsModel& model, const std::vector<int>& grid_ns,
    double half_width, const StencilSet& stencil, OperatorKind kind, bool solve_mode,
    SolverConfig solver_config = {}) {
    if (grid_ns.size() < 3)
        throw InvalidParameterError("refinement_study: need at least 3 grids");
    for (size_t i = 1; i < grid_ns.size(); ++i)
        if (grid_ns[i] <= grid_ns[i - 1])
            throw InvalidParameterError("refinement_study: grids must strictly refine");

    std::vector<RefinementRow> rows;
    for (int n : grid_ns) {
        const Grid2D grid = build_grid(n, half_width);
        const double collar = 2.0 * stencil.width * grid.h;
        const ScalarField exact = sample(oracle, grid);

        RefinementRow row;
        row.n = n;
        row.h = grid.h;
        row.sup_error = std::numeric_limits<double>::quiet_NaN();
        row.min_sample_singular_dist = std::numeric_limits<double>::infinity();

        SolveOutcome solved;
        if (solve_mode) {
            solved = solve(grid, stencil, model, oracle.boundary(), kind, solver_config);
            row.sup_error = 0.0;
            row.sweeps_used = solved.sweeps_used;
        }

        for (int iy = stencil.width; iy < grid.n - stencil.width; ++iy) {
            for (int ix = stencil.width; ix < grid.n - stencil.width; ++ix) {
                const Vec2 x = grid.coord(ix, iy);
                const double sd = oracle.singular_distance(x);
                if (sd < collar) continue;
                row.min_sample_singular_dist = std::min(row.min_sample_singular_dist, sd);
                const int node = grid.idx(ix, iy);
                const double op = inf_laplacian(exact, stencil, node, kind);
                row.sup_residual = std::max(
                    row.sup_residual, std::abs(op - analytic_operator_value(oracle, x, kind)));
                if (solve_mode)
                    row.sup_error = std::max(
                        row.sup_error, std::abs(solved.field[node] - exact[node]));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace inflap
