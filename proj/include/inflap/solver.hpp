#pragma once

#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "inflap/operators.hpp"

namespace inflap {

enum class SweepOrder { lexicographic, red_black };

struct SolverConfig {
    double tolerance = 1e-9;  ///< sup-norm of applied update per sweep
    int max_sweeps = 50000;
    double grad_floor = -1.0; ///< epsilon_g; negative means auto (h^2)
    double damping = 1.0;     ///< omega in (0,1]
    SweepOrder sweep_order = SweepOrder::lexicographic;
    bool deterministic = true;
    int threads = 1;          ///< used by red_black phases only

    void validate() const {
        if (!(tolerance > 0.0)) throw InvalidParameterError("solver: tolerance must be > 0");
        if (max_sweeps < 1) throw InvalidParameterError("solver: max_sweeps must be >= 1");
        if (!(damping > 0.0 && damping <= 1.0))
            throw InvalidParameterError("solver: damping must lie in (0,1]");
        if (threads < 1) throw InvalidParameterError("solver: threads must be >= 1");
    }
};

/// Dirichlet trace, evaluated on boundary nodes at solve time.
struct BoundaryData {
    std::function<double(Vec2)> trace;
    std::string tag;

    static BoundaryData constant(double v) {
        return {[v](Vec2) { return v; }, "constant"};
    }
    static BoundaryData affine(double px, double py, double c) {
        return {[=](Vec2 x) { return px * x.x + py * x.y + c; }, "affine"};
    }
    /// Odd trace g(x) = amplitude * x1, the two-phase fixture.
    static BoundaryData custom_odd(double amplitude) {
        return {[=](Vec2 x) { return amplitude * x.x; }, "custom_odd"};
    }
};

struct SolveOutcome {
    ScalarField field;
    int sweeps_used = 0;
    double final_update_norm = std::numeric_limits<double>::infinity();
    double final_residual_sup = 0.0;
    bool converged = false;
    double tolerance = 0.0; ///< copied from the config for slack arithmetic
};

namespace detail {

/// Implicit part of the local right-hand side: scale * (t_+)^expo, the
/// absorption shape of the dead-core and Henon models. Non-decreasing in t,
/// which keeps the local root unique and the update monotone.
struct AbsorptionTerm {
    double scale = 0.0;
    double expo = 0.0;
};

inline constexpr int kMaxAbsorption = 8;

/// Root of
///
///   max_k phi_k(t) + min_k phi_k(t) = 0,
///   phi_k(t) = (v_k - t)/d_k - (d_k/2) * R(t),
///   R(t) = gt + sum_e scale_e (t_+)^{expo_e},
///
/// the frozen-neighbor local equation: at the active pair (i,j) this is the
/// bent-chord scheme equated to the local right-hand side R, with the
/// forcing part gt frozen and the absorption part implicit in t. R is
/// non-negative and non-decreasing, so the left side is strictly
/// decreasing and the root unique; safeguarded Newton over the active pair
/// lands on it in a handful of scans.
inline double local_root(const double* v, const double* d, int count, double gt,
                         const AbsorptionTerm* abs_terms, int n_abs, double t0) {
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (int k = 0; k < count; ++k) {
        vmin = std::min(vmin, v[k]);
        vmax = std::max(vmax, v[k]);
        dmax = std::max(dmax, d[k]);
    }
    double rmax = gt;
    for (int e = 0; e < n_abs; ++e)
        rmax += abs_terms[e].scale * pos_pow(vmax, abs_terms[e].expo);
    double lo = vmin - 0.5 * dmax * dmax * rmax;
    double hi = vmax;
    double t = std::clamp(t0, lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        double absorb = 0.0, dabsorb = 0.0;
        if (t > 0.0) {
            for (int e = 0; e < n_abs; ++e) {
                const double s = abs_terms[e].scale, p = abs_terms[e].expo;
                absorb += s * pos_pow(t, p);
                if (p == 1.0) dabsorb += s;
                else if (p > 0.0) dabsorb += s * p * pos_pow(t, p - 1.0);
            }
        }
        const double r = gt + absorb;
        int i = 0, j = 0;
        double pmax = -std::numeric_limits<double>::infinity();
        double pmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < count; ++k) {
            const double phi = (v[k] - t) / d[k] - 0.5 * d[k] * r;
            if (phi > pmax) { pmax = phi; i = k; }
            if (phi < pmin) { pmin = phi; j = k; }
        }
        if (i == j) j = (i == 0) ? 1 : 0; // all phi equal
        const double psi = pmax + pmin;
        if (psi == 0.0) return t;
        if (psi > 0.0) lo = std::max(lo, t);
        else hi = std::min(hi, t);
        if (!(hi > lo)) return t;
        const double bi = 1.0 / d[i], bj = 1.0 / d[j];
        const double slope = bi + bj + 0.5 * (d[i] + d[j]) * dabsorb;
        double tp = t + psi / slope; // psi strictly decreasing: Newton step
        if (!std::isfinite(tp) || tp <= lo || tp >= hi) tp = 0.5 * (lo + hi);
        if (tp == t) {
            // interval collapsed to rounding width
            return psi > 0.0 ? hi : lo;
        }
        t = tp;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(t)) &&
            iter > 4)
            return t;
    }
    return t;
}

/// Precomputed sweep geometry for one (grid, stencil) pair.
struct SweepPlan {
    int n = 0;
    double h = 0.0;
    int width = 0;
    int count = 0;
    std::array<int, kMaxStencilDirs> off{};
    std::array<int, kMaxStencilDirs> dp{};
    std::array<int, kMaxStencilDirs> dq{};
    std::array<double, kMaxStencilDirs> arm{};

    SweepPlan(const Grid2D& g, const StencilSet& s) {
        n = g.n;
        h = g.h;
        width = s.width;
        count = s.count();
        for (int k = 0; k < count; ++k) {
            dp[k] = s.dirs[k].p;
            dq[k] = s.dirs[k].q;
            off[k] = s.dirs[k].q * n + s.dirs[k].p;
            arm[k] = s.dirs[k].len * g.h;
        }
    }

    /// Gather neighbor values and arms; returns the number collected. Near
    /// the boundary only antipodally closed direction pairs survive, the
    /// same rule sample_stencil applies.
    int gather(const std::vector<double>& vals, int ix, int iy, double* vv,
               double* dd) const {
        const int node = iy * n + ix;
        if (ix >= width && iy >= width && ix < n - width && iy < n - width) {
            for (int k = 0; k < count; ++k) {
                vv[k] = vals[node + off[k]];
                dd[k] = arm[k];
            }
            return count;
        }
        const int px = std::min(ix, n - 1 - ix);
        const int py = std::min(iy, n - 1 - iy);
        int m = 0;
        for (int k = 0; k < count; ++k) {
            if (std::abs(dp[k]) > px || std::abs(dq[k]) > py) continue;
            vv[m] = vals[node + off[k]];
            dd[m] = arm[k];
            ++m;
        }
        return m;
    }
};

inline void parallel_rows(int iy_begin, int iy_end, int threads,
                          const std::function<void(int, int)>& body) {
    const int rows = iy_end - iy_begin;
    if (threads <= 1 || rows < 2 * threads) {
        body(iy_begin, iy_end);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (rows + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int b = iy_begin + t * chunk;
        const int e = std::min(iy_end, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

namespace detail {

/// Split of G by its role in the local solve: the part frozen at the
/// previous sweep (weights, two-phase |u|^m factors, obstacle forcing) and
/// the absorption powers of t_+ taken implicitly. Both sides carry the
/// gradient-factor division with the floor eps_g.
struct LocalRhs {
    double frozen = 0.0;
    std::array<AbsorptionTerm, kMaxAbsorption> terms{};
    int n_terms = 0;
};

inline LocalRhs split_rhs(const RhsModel& model, Vec2 x, double u_prev, double g,
                          double scheme_gamma, double eps_g) {
    const double denom =
        scheme_gamma == 2.0 ? 1.0 : std::max(gradient_factor(g, scheme_gamma), eps_g);
    LocalRhs out;
    switch (model.kind) {
        case RhsKind::zero: break;
        case RhsKind::general:
            out.frozen = evaluate_rhs(model, x, u_prev, g) / denom;
            break;
        case RhsKind::obstacle:
            out.frozen = model.weight.eval(x) / denom;
            break;
        case RhsKind::dead_core:
            out.terms[0] = {model.lambda / denom, model.gamma};
            out.n_terms = 1;
            break;
        case RhsKind::henon_sum: {
            for (const HenonTerm& t : model.terms) {
                if (out.n_terms == kMaxAbsorption)
                    throw InvalidParameterError("solve: too many henon terms");
                out.terms[out.n_terms++] = {
                    t.dist_weight.eval(x) * min1_pow(g, t.kappa) / denom, t.m};
            }
            break;
        }
    }
    return out;
}

} // namespace detail

/// One relaxation value at a node: solves the scalar local equation with
/// the weight and gradient factors frozen at the current field and the
/// absorption powers of the unknown taken implicitly, then blends with the
/// damping factor. The floor epsilon_g guards the gradient division of the
/// direct and gamma forms.
inline double local_update(const ScalarField& f, const StencilSet& s, int node,
                           const RhsModel& model, OperatorKind kind,
                           const SolverConfig& config) {
    config.validate();
    const LocalStencilSample sm = sample_stencil(f, s, node, false);
    const double g = grad_magnitude_sample(sm);
    const double eps = config.grad_floor < 0.0 ? f.grid.h * f.grid.h : config.grad_floor;
    const detail::LocalRhs rhs = detail::split_rhs(model, f.grid.coord(node), f[node],
                                                   g, kind.scheme_gamma(), eps);
    const double t =
        detail::local_root(sm.value.data(), sm.arm.data(), sm.count, rhs.frozen,
                           rhs.terms.data(), rhs.n_terms, f[node]);
    return f[node] + config.damping * (t - f[node]);
}

/// Gauss-Seidel (or buffered red-black) sweeps of local_update until the
/// sup-norm of the applied update drops below tolerance. The obstacle model
/// projects onto u >= 0 after every update. Non-convergence is reported in
/// the outcome, not thrown.
inline SolveOutcome solve(const Grid2D& grid, const StencilSet& stencil,
                          const RhsModel& model, const BoundaryData& boundary,
                          OperatorKind kind, const SolverConfig& config) {
    config.validate();
    if (!boundary.trace) throw InvalidParameterError("solve: boundary trace not set");

    const int n = grid.n;
    ScalarField u(grid, FieldRole::solution);

    // Dirichlet trace on the boundary ring.
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (!grid.on_boundary(ix, iy)) continue;
            const double v = boundary.trace(grid.coord(ix, iy));
            if (!std::isfinite(v))
                throw InvalidParameterError("solve: boundary trace not finite");
            u.at(ix, iy) = v;
            bmin = std::min(bmin, v);
            bmax = std::max(bmax, v);
        }
    }

    // Coons-patch blend of the four edge traces, clamped to the boundary
    // range so every iterate obeys the discrete maximum principle.
    const double L = grid.half_width;
    for (int iy = 1; iy < n - 1; ++iy) {
        for (int ix = 1; ix < n - 1; ++ix) {
            const Vec2 x = grid.coord(ix, iy);
            const double sx = (x.x + L) / (2.0 * L);
            const double sy = (x.y + L) / (2.0 * L);
            const double west = u.at(0, iy), east = u.at(n - 1, iy);
            const double south = u.at(ix, 0), north = u.at(ix, n - 1);
            double v = (1.0 - sx) * west + sx * east + (1.0 - sy) * south + sy * north;
            v -= (1.0 - sx) * (1.0 - sy) * u.at(0, 0) + sx * (1.0 - sy) * u.at(n - 1, 0) +
                 (1.0 - sx) * sy * u.at(0, n - 1) + sx * sy * u.at(n - 1, n - 1);
            u.at(ix, iy) = std::clamp(v, bmin, bmax);
        }
    }
    if (model.is_obstacle()) {
        for (int iy = 1; iy < n - 1; ++iy)
            for (int ix = 1; ix < n - 1; ++ix)
                u.at(ix, iy) = std::max(u.at(ix, iy), 0.0);
    }

    const detail::SweepPlan plan(grid, stencil);
    const double eps = config.grad_floor < 0.0 ? grid.h * grid.h : config.grad_floor;
    const double sg = kind.scheme_gamma();
    const bool zero_rhs = model.kind == RhsKind::zero;

    const int n_abs = model.kind == RhsKind::dead_core ? 1
                      : model.kind == RhsKind::henon_sum
                          ? static_cast<int>(model.terms.size())
                          : 0;
    if (n_abs > detail::kMaxAbsorption)
        throw InvalidParameterError("solve: too many henon terms");
    std::array<double, detail::kMaxAbsorption> abs_expo{};
    if (model.kind == RhsKind::dead_core) abs_expo[0] = model.gamma;
    for (int e = 0; e < n_abs && model.kind == RhsKind::henon_sum; ++e)
        abs_expo[e] = model.terms[e].m;

    std::vector<double> gtilde(static_cast<size_t>(grid.size()), 0.0);
    std::vector<double> abs_scale(
        n_abs > 0 ? static_cast<size_t>(grid.size()) * n_abs : 0, 0.0);
    std::vector<double> scratch;
    if (config.sweep_order == SweepOrder::red_black)
        scratch.assign(static_cast<size_t>(grid.size()), 0.0);

    // weight and gradient factors frozen on the previous-sweep field
    auto refresh_gtilde = [&](int b, int e) {
        double vv[kMaxStencilDirs], dd[kMaxStencilDirs];
        for (int iy = b; iy < e; ++iy) {
            for (int ix = 1; ix < n - 1; ++ix) {
                const int node = iy * n + ix;
                const int m = plan.gather(u.values, ix, iy, vv, dd);
                const double c = u.values[node];
                double smax = -std::numeric_limits<double>::infinity();
                double smin = std::numeric_limits<double>::infinity();
                for (int k = 0; k < m; ++k) {
                    const double sl = (vv[k] - c) / dd[k];
                    smax = std::max(smax, sl);
                    smin = std::min(smin, sl);
                }
                const double g = 0.5 * (smax - smin);
                const detail::LocalRhs rhs =
                    detail::split_rhs(model, grid.coord(ix, iy), c, g, sg, eps);
                gtilde[node] = rhs.frozen;
                for (int t = 0; t < n_abs; ++t)
                    abs_scale[static_cast<size_t>(node) * n_abs + t] =
                        rhs.terms[t].scale;
            }
        }
    };

    double omega = config.damping;
    const double omega_floor = config.damping / 16.0;
    double best_norm = std::numeric_limits<double>::infinity();
    int stalled = 0;

    SolveOutcome out;
    out.tolerance = config.tolerance;

    int sweep = 0;
    for (; sweep < config.max_sweeps; ++sweep) {
        if (!zero_rhs)
            detail::parallel_rows(1, n - 1, config.threads, refresh_gtilde);

        double norm = 0.0;
        auto relax_value = [&](int ix, int iy, double* vv, double* dd) {
            const int node = iy * n + ix;
            const double cur = u.values[node];
            const int m = plan.gather(u.values, ix, iy, vv, dd);
            detail::AbsorptionTerm terms[detail::kMaxAbsorption];
            for (int t = 0; t < n_abs; ++t)
                terms[t] = {abs_scale[static_cast<size_t>(node) * n_abs + t],
                            abs_expo[t]};
            const double t =
                detail::local_root(vv, dd, m, gtilde[node], terms, n_abs, cur);
            double next = cur + omega * (t - cur);
            if (model.is_obstacle()) next = std::max(next, 0.0);
            return next;
        };

        if (config.sweep_order == SweepOrder::lexicographic) {
            double vv[kMaxStencilDirs], dd[kMaxStencilDirs];
            for (int iy = 1; iy < n - 1; ++iy) {
                for (int ix = 1; ix < n - 1; ++ix) {
                    const int node = iy * n + ix;
                    const double cur = u.values[node];
                    const double next = relax_value(ix, iy, vv, dd);
                    u.values[node] = next;
                    norm = std::max(norm, std::abs(next - cur));
                }
            }
        } else {
            for (int color = 0; color < 2; ++color) {
                detail::parallel_rows(1, n - 1, config.threads, [&](int b, int e) {
                    double vv[kMaxStencilDirs], dd[kMaxStencilDirs];
                    for (int iy = b; iy < e; ++iy)
                        for (int ix = 1 + ((iy + color + 1) % 2); ix < n - 1; ix += 2)
                            scratch[iy * n + ix] = relax_value(ix, iy, vv, dd);
                });
                for (int iy = 1; iy < n - 1; ++iy) {
                    for (int ix = 1 + ((iy + color + 1) % 2); ix < n - 1; ix += 2) {
                        const int node = iy * n + ix;
                        norm = std::max(norm, std::abs(scratch[node] - u.values[node]));
                        u.values[node] = scratch[node];
                    }
                }
            }
        }

        if (!std::isfinite(norm))
            throw NumericalFailureError("solve: non-finite update norm at sweep " +
                                        std::to_string(sweep));
        out.final_update_norm = norm;
        if (norm <= config.tolerance) {
            out.converged = true;
            ++sweep;
            break;
        }
        // stalled update norms signal a relaxation cycle; back off omega
        if (norm < best_norm) {
            best_norm = norm;
            stalled = 0;
        } else if (++stalled >= 10) {
            omega = std::max(0.5 * omega, omega_floor);
            stalled = 0;
        }
    }

    out.sweeps_used = std::min(sweep, config.max_sweeps);
    out.field = std::move(u);
    out.final_residual_sup = residual_sup(out.field, stencil, model, kind);
    return out;
}

/// Discrete comparison: u <= v + slack node-wise, slack defaulting to
/// 2*(tol_u + tol_v). Caller guarantees the ordering hypotheses.
inline bool comparison_check(const SolveOutcome& u, const SolveOutcome& v,
                             double slack = -1.0) {
    if (!u.field.grid.same_layout(v.field.grid))
        throw InvalidParameterError("comparison_check: grid mismatch");
    if (!u.converged || !v.converged)
        throw InvalidParameterError("comparison_check: both solves must have converged");
    if (slack < 0.0) slack = 2.0 * (u.tolerance + v.tolerance);
    for (size_t i = 0; i < u.field.values.size(); ++i)
        if (u.field.values[i] > v.field.values[i] + slack) return false;
    return true;
}

/// Discrete maximum principle for homogeneous solves: interior extremes are
/// controlled by the boundary extremes up to 2*tolerance.
inline bool max_principle_check(const SolveOutcome& out) {
    const Grid2D& g = out.field.grid;
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    double imin = bmin, imax = -bmin;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            const double v = out.field.at(ix, iy);
            if (g.on_boundary(ix, iy)) {
                bmin = std::min(bmin, v);
                bmax = std::max(bmax, v);
            } else {
                imin = std::min(imin, v);
                imax = std::max(imax, v);
            }
        }
    }
    const double slack = 2.0 * out.tolerance;
    return imax <= bmax + slack && imin >= bmin - slack;
}

/// Discrete Lipschitz seminorm over stencil-neighbor pairs inside the
/// half-square, for reporting against the L-infinity + forcing^(1/3) bound.
inline double lipschitz_certificate(const SolveOutcome& out, const StencilSet& s) {
    const Grid2D& g = out.field.grid;
    const double half = 0.5 * g.half_width;
    double sup = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            const Vec2 x = g.coord(ix, iy);
            if (std::abs(x.x) > half || std::abs(x.y) > half) continue;
            for (int k = 0; k < s.count(); ++k) {
                const int jx = ix + s.dirs[k].p, jy = iy + s.dirs[k].q;
                if (jx < 0 || jy < 0 || jx >= g.n || jy >= g.n) continue;
                const Vec2 y = g.coord(jx, jy);
                if (std::abs(y.x) > half || std::abs(y.y) > half) continue;
                sup = std::max(sup, std::abs(out.field.at(ix, iy) - out.field.at(jx, jy)) /
                                        (s.dirs[k].len * g.h));
            }
        }
    }
    return sup;
}

} // namespace inflap
