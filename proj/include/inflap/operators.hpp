#pragma once

#include <array>
#include <cmath>

#include "inflap/grid.hpp"
#include "inflap/models.hpp"

namespace inflap {

enum class OperatorVariant { direct, normalized, gamma_family };

/// Which member of the |Du|^{-gamma} * (infinity-Laplacian) family to
/// evaluate: gamma = 0 is the direct operator, gamma = 2 the normalized one.
struct OperatorKind {
    OperatorVariant variant = OperatorVariant::direct;
    double gamma = 0.0;

    static OperatorKind direct() { return {OperatorVariant::direct, 0.0}; }
    static OperatorKind normalized() { return {OperatorVariant::normalized, 2.0}; }
    static OperatorKind gamma_family(double g) {
        if (!(g >= 0.0 && g <= 2.0))
            throw InvalidParameterError("gamma_family: gamma must lie in [0,2]");
        return {OperatorVariant::gamma_family, g};
    }

    /// Homogeneity used when dividing G by the gradient factor.
    double scheme_gamma() const {
        switch (variant) {
            case OperatorVariant::direct: return 0.0;
            case OperatorVariant::normalized: return 2.0;
            case OperatorVariant::gamma_family: return gamma;
        }
        return 0.0;
    }
};

inline constexpr int kMaxStencilDirs = 48; // W = 4

/// One node's stencil neighborhood: neighbor values with their physical
/// arm lengths, plus the extremal direction indices. argmax attains the
/// maximum of the difference quotients (u(x+arm)-u(x))/d, argmin the
/// minimum; ties break toward the lowest direction index.
struct LocalStencilSample {
    double center = 0.0;
    int count = 0;
    std::array<double, kMaxStencilDirs> value{};
    std::array<double, kMaxStencilDirs> arm{};
    int argmax = -1; ///< max slope
    int argmin = -1; ///< min slope

    double slope(int k) const { return (value[k] - center) / arm[k]; }
};

/// Gather the neighborhood of an interior node. With require_full the node
/// must support every stencil direction (depth >= W); otherwise the largest
/// antipodally closed in-bounds subset is collected, so the truncated
/// operator keeps its exactness on affine fields. Throws OutOfDomainError
/// when the support is not available.
inline LocalStencilSample sample_stencil(const ScalarField& f, const StencilSet& s,
                                         int node, bool require_full = false) {
    const Grid2D& g = f.grid;
    const int ix = node % g.n;
    const int iy = node / g.n;
    if (g.on_boundary(ix, iy))
        throw OutOfDomainError("sample_stencil: boundary node");
    if (require_full && g.boundary_depth(ix, iy) < s.width)
        throw OutOfDomainError("sample_stencil: node lacks full stencil support");

    LocalStencilSample out;
    out.center = f[node];
    auto in_bounds = [&](int k) {
        const int jx = ix + s.dirs[k].p;
        const int jy = iy + s.dirs[k].q;
        return jx >= 0 && jy >= 0 && jx < g.n && jy < g.n;
    };
    for (int k = 0; k < s.count(); ++k) {
        if (!in_bounds(k) || !in_bounds(s.antipode[k])) continue;
        const int i = out.count++;
        out.value[i] = f.at(ix + s.dirs[k].p, iy + s.dirs[k].q);
        out.arm[i] = s.dirs[k].len * g.h;
    }
    double smax = -std::numeric_limits<double>::infinity();
    double smin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < out.count; ++k) {
        const double sl = out.slope(k);
        if (sl > smax) { smax = sl; out.argmax = k; }
        if (sl < smin) { smin = sl; out.argmin = k; }
    }
    return out;
}

/// Gradient surrogate: half the spread between the steepest-ascent and
/// steepest-descent difference quotients,
///
///   g_h = (s_+ - s_-) / 2 = (u(x+*) - u(x-*)) / (d+ + d-)  when the
///   extreme arms match.
///
/// Symmetric, exact for affine fields whose slope lies on a stencil ray,
/// never negative, and continuous in the field values (extreme slopes are
/// maxima/minima of continuous quotients), which keeps the coupled sweep
/// map free of selection-jump cycles.
inline double grad_magnitude_sample(const LocalStencilSample& s) {
    return 0.5 * (s.slope(s.argmax) - s.slope(s.argmin));
}

inline double grad_magnitude(const ScalarField& f, const StencilSet& s, int node) {
    return grad_magnitude_sample(sample_stencil(f, s, node));
}

/// Normalized infinity-Laplacian: the monotone max-min over chord pairs of
///
///   A_ij = (2/(d_i+d_j)) * [ (u_i - u)/d_i + (u_j - u)/d_j ],
///
/// i.e. the second difference along the bent chord through directions i and
/// j. The maximum over i of the minimum over j != i picks the steepest
/// chord; every A_ij has fixed positive neighbor coefficients, so the value
/// never decreases when a neighbor value is raised. Exact on affine fields
/// (0) and on |x|^2 at its vertex (2).
inline double normalized_inf_laplacian_sample(const LocalStencilSample& s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.count; ++i) {
        const double si = s.slope(i);
        double row = std::numeric_limits<double>::infinity();
        for (int j = 0; j < s.count; ++j) {
            if (j == i) continue;
            const double a = 2.0 * (si + s.slope(j)) / (s.arm[i] + s.arm[j]);
            row = std::min(row, a);
        }
        best = std::max(best, row);
    }
    return best;
}

inline double normalized_inf_laplacian(const ScalarField& f, const StencilSet& s,
                                       int node) {
    return normalized_inf_laplacian_sample(sample_stencil(f, s, node));
}

/// Gradient prefactor g^(2-gamma) with the gamma = 2 case pinned to 1.
inline double gradient_factor(double g, double scheme_gamma) {
    if (scheme_gamma == 2.0) return 1.0;
    if (scheme_gamma == 0.0) return g * g;
    return std::pow(g, 2.0 - scheme_gamma);
}

inline double inf_laplacian_sample(const LocalStencilSample& s, OperatorKind kind) {
    const double ln = normalized_inf_laplacian_sample(s);
    if (kind.variant == OperatorVariant::normalized) return ln;
    return gradient_factor(grad_magnitude_sample(s), kind.scheme_gamma()) * ln;
}

inline double inf_laplacian(const ScalarField& f, const StencilSet& s, int node,
                            OperatorKind kind) {
    return inf_laplacian_sample(sample_stencil(f, s, node), kind);
}

/// Pointwise defect of the equation at every interior node (truncated
/// stencils next to the boundary), zero on the boundary. For the obstacle
/// model the defect of the complementarity form min{Lu - f, u} is reported.
inline ScalarField residual_field(const ScalarField& f, const StencilSet& s,
                                  const RhsModel& model, OperatorKind kind) {
    const Grid2D& g = f.grid;
    ScalarField res(g, FieldRole::residual);
    for (int iy = 1; iy < g.n - 1; ++iy) {
        for (int ix = 1; ix < g.n - 1; ++ix) {
            const int node = g.idx(ix, iy);
            const LocalStencilSample sm = sample_stencil(f, s, node, false);
            const double op = inf_laplacian_sample(sm, kind);
            const double gh = grad_magnitude_sample(sm);
            const double rhs = evaluate_rhs(model, g.coord(ix, iy), f[node], gh);
            if (model.is_obstacle())
                res[node] = std::min(op - rhs, f[node]);
            else
                res[node] = op - rhs;
        }
    }
    return res;
}

inline double residual_sup(const ScalarField& f, const StencilSet& s,
                           const RhsModel& model, OperatorKind kind) {
    const ScalarField r = residual_field(f, s, model, kind);
    double sup = 0.0;
    for (double v : r.values) sup = std::max(sup, std::abs(v));
    return sup;
}

} // namespace inflap
