#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "inflap/operators.hpp"

namespace inflap {

/// Default thresholds for vanishing-order-1 detection: tau_u dominates the
/// scheme consistency error, tau_g the h^{1/3} gradient modulus expected of
/// 4/3-growth fields near critical points.
inline double default_tau_u(double h) { return 10.0 * h * h; }
inline double default_tau_g(double h) { return 2.0 * std::cbrt(h); }
inline double default_branch_radius(double h) { return 3.0 * h; }

/// Nodes where |u| <= tau_u and the gradient surrogate <= tau_g.
struct CriticalSet {
    std::vector<int> nodes;
    double tau_u = 0.0;
    double tau_g = 0.0;
};

inline CriticalSet detect_critical_set(const ScalarField& f, const StencilSet& s,
                                       double tau_u, double tau_g) {
    if (!(tau_u > 0.0 && tau_g > 0.0))
        throw InvalidParameterError("detect_critical_set: thresholds must be > 0");
    const Grid2D& g = f.grid;
    CriticalSet out;
    out.tau_u = tau_u;
    out.tau_g = tau_g;
    for (int iy = 1; iy < g.n - 1; ++iy) {
        for (int ix = 1; ix < g.n - 1; ++ix) {
            const int node = g.idx(ix, iy);
            if (std::abs(f[node]) > tau_u) continue;
            if (grad_magnitude(f, s, node) > tau_g) continue;
            out.nodes.push_back(node);
        }
    }
    return out;
}

/// Nodes approximating the branching set: |u| <= tau_u with both a strictly
/// positive and a strictly negative value within the detection radius.
struct BranchingSet {
    std::vector<int> nodes;
    double tau_u = 0.0;
    double detection_radius = 0.0;
};

inline bool is_branching_node(const ScalarField& f, int node, double tau_u,
                              double rho_b) {
    const Grid2D& g = f.grid;
    if (std::abs(f[node]) > tau_u) return false;
    const int cx = node % g.n, cy = node / g.n;
    const int reach = static_cast<int>(std::floor(rho_b / g.h)) + 1;
    bool pos = false, neg = false;
    for (int dy = -reach; dy <= reach && !(pos && neg); ++dy) {
        const int iy = cy + dy;
        if (iy < 0 || iy >= g.n) continue;
        for (int dx = -reach; dx <= reach; ++dx) {
            const int ix = cx + dx;
            if (ix < 0 || ix >= g.n) continue;
            if ((g.h * g.h) * (double(dx) * dx + double(dy) * dy) > rho_b * rho_b)
                continue;
            const double v = f.at(ix, iy);
            pos = pos || v > 0.0;
            neg = neg || v < 0.0;
        }
    }
    return pos && neg;
}

inline BranchingSet detect_branching_set(const ScalarField& f, double tau_u,
                                         double rho_b) {
    if (!(tau_u > 0.0 && rho_b > 0.0))
        throw InvalidParameterError("detect_branching_set: parameters must be > 0");
    const Grid2D& g = f.grid;
    BranchingSet out;
    out.tau_u = tau_u;
    out.detection_radius = rho_b;
    for (int iy = 1; iy < g.n - 1; ++iy)
        for (int ix = 1; ix < g.n - 1; ++ix)
            if (is_branching_node(f, g.idx(ix, iy), tau_u, rho_b))
                out.nodes.push_back(g.idx(ix, iy));
    return out;
}

// ---------------------------------------------------------------------------
// Exponent fitting
// ---------------------------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

/// Ordinary least squares on (log r, log s) over the pairs passing the
/// window (r >= r_min, s >= s_min, s > 0).
inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& pairs,
                              double r_min = 0.0, double s_min = 0.0) {
    std::vector<std::pair<double, double>> logs;
    for (auto [r, sv] : pairs) {
        if (!(sv > 0.0) || r < r_min || sv < s_min) continue;
        logs.emplace_back(std::log(r), std::log(sv));
    }
    if (logs.size() < 4)
        throw InsufficientDataError("fit_exponent: fewer than 4 usable pairs");
    double mx = 0, my = 0;
    for (auto [x, y] : logs) { mx += x; my += y; }
    mx /= logs.size();
    my /= logs.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    FitResult fit;
    fit.points_used = static_cast<int>(logs.size());
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        fit.r_squared = 1.0 - std::max(ss_res, 0.0) / syy;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Dyadic decay measurement
// ---------------------------------------------------------------------------

/// Per-ball sup norms of u, u_+, u_- over dyadic radii about one center,
/// with the fitted growth exponent and its verdict against a prediction.
struct DecayReport {
    int center = -1;
    Vec2 center_xy{};
    std::vector<double> radii;   ///< strictly decreasing
    std::vector<double> sup_abs;
    std::vector<double> sup_pos;
    std::vector<double> sup_neg;
    double alpha_fit = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double alpha_pred = std::numeric_limits<double>::quiet_NaN();
    double tol_alpha = 0.15;
    double fit_r_min = 0.0;  ///< resolution floor 4h
    double fit_s_min = 0.0;  ///< noise floor 10 * solver tolerance
    int points_used = 0;
    bool has_prediction = false;
    bool pass = false;

    bool fits_prediction() const {
        return !has_prediction ||
               (std::abs(alpha_fit - alpha_pred) <= tol_alpha && r_squared >= 0.98);
    }
};

/// Largest dyadic fraction of the half-width whose ball sits in the open
/// interior around the center; zero if none fits.
inline double largest_dyadic_radius(const Grid2D& g, int center) {
    double r = 0.5 * g.half_width;
    while (r > g.h) {
        try {
            ball_nodes(g, center, r);
            return r;
        } catch (const OutOfDomainError&) {
            r *= 0.5;
        }
    }
    return 0.0;
}

inline DecayReport measure_decay(const ScalarField& f, int center, int k_max,
                                 double solver_tol, double alpha_pred,
                                 double tol_alpha = 0.15) {
    const Grid2D& g = f.grid;
    if (center < 0 || center >= g.size() || g.on_boundary(center))
        throw InvalidParameterError("measure_decay: center must be interior");

    const double r0 = largest_dyadic_radius(g, center);
    if (r0 <= 0.0)
        throw InsufficientDataError("measure_decay: no admissible dyadic radius");

    DecayReport rep;
    rep.center = center;
    rep.center_xy = g.coord(center);
    rep.alpha_pred = alpha_pred;
    rep.has_prediction = std::isfinite(alpha_pred);
    rep.tol_alpha = tol_alpha;
    rep.fit_r_min = 4.0 * g.h;
    rep.fit_s_min = 10.0 * solver_tol;

    for (int k = 0; k <= k_max; ++k) {
        const double r = r0 * std::pow(0.5, k);
        const BallIndex ball = ball_nodes(g, center, r);
        double sa = 0.0, sp = 0.0, sn = 0.0;
        for (int node : ball.nodes) {
            const double v = f[node];
            sa = std::max(sa, std::abs(v));
            sp = std::max(sp, std::max(v, 0.0));
            sn = std::max(sn, std::max(-v, 0.0));
        }
        rep.radii.push_back(r);
        rep.sup_abs.push_back(sa);
        rep.sup_pos.push_back(sp);
        rep.sup_neg.push_back(sn);
    }

    std::vector<std::pair<double, double>> pairs;
    for (size_t k = 0; k < rep.radii.size(); ++k)
        pairs.emplace_back(rep.radii[k], rep.sup_abs[k]);
    const FitResult fit = fit_exponent(pairs, rep.fit_r_min, rep.fit_s_min);
    rep.alpha_fit = fit.slope;
    rep.intercept = fit.intercept;
    rep.r_squared = fit.r_squared;
    rep.points_used = fit.points_used;
    rep.pass = rep.fits_prediction();
    return rep;
}

// ---------------------------------------------------------------------------
// Non-degeneracy
// ---------------------------------------------------------------------------

struct NondegRow {
    double r = 0.0;
    double shell_sup = 0.0; ///< sup of u over the annulus {r-h <= |x-x0| <= r}
    double bound = 0.0;     ///< c * K_nd * r^alpha
    double shell_theta = 0.0;
    bool pass = false;
};

struct NondegReport {
    double sigma = 0.0;
    double alpha = 0.0;
    double theta = 0.0; ///< used for the constant (given or measured)
    double K_nd = 0.0;
    double c_factor = 0.5;
    bool hypothesis_ok = false;
    std::string note;
    std::vector<NondegRow> rows;
    bool pass = false;
};

/// Shell lower-bound check sup_{shell r} u >= c * K_nd * r^alpha with
/// alpha = (sigma+4)/3 and K_nd from the non-degeneracy constant. theta_in
/// <= 0 requests estimation as the minimum over shells of inf G / r^sigma.
/// A forcing that fails inf G > 0 yields a hypothesis-failure report.
inline NondegReport check_nondegeneracy(const ScalarField& f, const StencilSet& s,
                                        int center, const RhsModel& model,
                                        double theta_in, double sigma,
                                        const std::vector<double>& radii,
                                        double c_factor = 0.5) {
    if (!(sigma >= 0.0))
        throw InvalidParameterError("check_nondegeneracy: sigma must be >= 0");
    if (radii.empty())
        throw InvalidParameterError("check_nondegeneracy: no radii given");
    const Grid2D& g = f.grid;
    const Vec2 x0 = g.coord(center);

    NondegReport rep;
    rep.sigma = sigma;
    rep.alpha = (sigma + 4.0) / 3.0;
    rep.c_factor = c_factor;

    double theta_meas = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const BallIndex outer = ball_nodes(g, center, r);
        NondegRow row;
        row.r = r;
        row.shell_sup = -std::numeric_limits<double>::infinity();
        double inf_g = std::numeric_limits<double>::infinity();
        for (int node : outer.nodes) {
            const double dist = norm(g.coord(node) - x0);
            if (dist < r - g.h) continue;
            row.shell_sup = std::max(row.shell_sup, f[node]);
            const double gh = grad_magnitude(f, s, node);
            inf_g = std::min(inf_g, evaluate_rhs(model, g.coord(node), f[node], gh));
        }
        row.shell_theta = inf_g / std::pow(r, sigma);
        theta_meas = std::min(theta_meas, row.shell_theta);
        rep.rows.push_back(row);
    }

    rep.hypothesis_ok = theta_in > 0.0 || theta_meas > 0.0;
    if (!rep.hypothesis_ok) {
        rep.note = "forcing not bounded below on the tested shells (theta <= 0)";
        rep.pass = false;
        return rep;
    }
    rep.theta = theta_in > 0.0 ? theta_in : theta_meas;
    rep.K_nd = nondegeneracy_constant(rep.theta, rep.alpha);
    rep.pass = true;
    for (NondegRow& row : rep.rows) {
        row.bound = c_factor * rep.K_nd * std::pow(row.r, rep.alpha);
        row.pass = row.shell_sup >= row.bound;
        rep.pass = rep.pass && row.pass;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Two-phase reflection diagnostics
// ---------------------------------------------------------------------------

/// Smallest constant C1 making the dyadic flip inequality
///   s(k+1) <= max{ C1 * r_{k+1}^alpha, 2^{-alpha} s(k) }
/// hold for all measured consecutive pairs; 0 when the geometric branch
/// already covers every step.
inline double minimal_flip_constant(const std::vector<double>& radii,
                                    const std::vector<double>& s, double alpha) {
    if (radii.size() != s.size() || radii.size() < 2)
        throw InvalidParameterError("minimal_flip_constant: need matched lists, >= 2");
    const double geo = std::pow(0.5, alpha);
    double c1 = 0.0;
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        if (s[k + 1] <= geo * s[k]) continue;
        c1 = std::max(c1, s[k + 1] / std::pow(radii[k + 1], alpha));
    }
    return c1;
}

struct ReflectionReport {
    int center = -1;
    double alpha = 0.0;
    double C0 = 0.0;
    std::vector<double> radii;
    std::vector<double> s_abs, s_pos, s_neg;
    bool hypothesis_ok = false; ///< s_neg(k) <= C0 r_k^alpha on all rows
    double C1_min = 0.0;
    double alpha_fit_pos = 0.0, alpha_fit_neg = 0.0;
    bool pass = false;
};

/// Measures the one-phase sup sequences about a branching point and checks
/// the flip inequality: hypothesis on u^-, conclusion constant on the full
/// norm, verdict pass iff minimal C1 <= 100 * C0.
inline ReflectionReport reflection_check(const ScalarField& f, int center, double r0,
                                         double alpha, double C0, double tau_u,
                                         double rho_b, double solver_tol = 0.0) {
    const Grid2D& g = f.grid;
    if (!is_branching_node(f, center, tau_u, rho_b))
        throw InvalidParameterError("reflection_check: center is not a branching point");
    if (!(alpha > 0.0) || !(C0 > 0.0))
        throw InvalidParameterError("reflection_check: alpha and C0 must be > 0");

    ReflectionReport rep;
    rep.center = center;
    rep.alpha = alpha;
    rep.C0 = C0;

    double r_top = largest_dyadic_radius(g, center);
    if (r_top <= 0.0) throw InsufficientDataError("reflection_check: center too close to boundary");
    r_top = std::min(r_top, r0);

    for (double r = r_top; r >= 4.0 * g.h; r *= 0.5) {
        const BallIndex ball = ball_nodes(g, center, r);
        double sa = 0.0, sp = 0.0, sn = 0.0;
        for (int node : ball.nodes) {
            const double v = f[node];
            sa = std::max(sa, std::abs(v));
            sp = std::max(sp, std::max(v, 0.0));
            sn = std::max(sn, std::max(-v, 0.0));
        }
        rep.radii.push_back(r);
        rep.s_abs.push_back(sa);
        rep.s_pos.push_back(sp);
        rep.s_neg.push_back(sn);
    }
    if (rep.radii.size() < 2)
        throw InsufficientDataError("reflection_check: fewer than 2 usable radii");

    rep.hypothesis_ok = true;
    for (size_t k = 0; k < rep.radii.size(); ++k) {
        const double cap = C0 * std::pow(rep.radii[k], alpha);
        if (rep.s_neg[k] > cap * (1.0 + 1e-12)) rep.hypothesis_ok = false;
    }
    rep.C1_min = minimal_flip_constant(rep.radii, rep.s_abs, alpha);

    auto side_fit = [&](const std::vector<double>& sv) {
        std::vector<std::pair<double, double>> pairs;
        for (size_t k = 0; k < rep.radii.size(); ++k)
            pairs.emplace_back(rep.radii[k], sv[k]);
        try {
            return fit_exponent(pairs, 0.0, 10.0 * solver_tol).slope;
        } catch (const InsufficientDataError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    rep.alpha_fit_pos = side_fit(rep.s_pos);
    rep.alpha_fit_neg = side_fit(rep.s_neg);

    rep.pass = rep.hypothesis_ok && rep.C1_min <= 100.0 * C0;
    return rep;
}

// ---------------------------------------------------------------------------
// Flatness diagnostics
// ---------------------------------------------------------------------------

struct FlatnessReport {
    double eps = 0.0;
    double inf_u = 0.0;       ///< infimum over the unit analysis ball
    double neg_density = 0.0; ///< node fraction with u < 0
    double sup_half = 0.0;    ///< sup |u| over the half-radius ball
};

/// Measures the improvement-of-flatness quantities on the largest dyadic
/// ball about the origin node. No verdict: the trade-off is tabulated, not
/// asserted.
inline FlatnessReport flatness_diagnostic(const ScalarField& f, double eps) {
    const Grid2D& g = f.grid;
    const int center = g.center_index();
    const double r0 = largest_dyadic_radius(g, center);
    if (r0 <= 0.0) throw InsufficientDataError("flatness_diagnostic: grid too small");

    const BallIndex ball = ball_nodes(g, center, r0);
    double sup_all = 0.0;
    for (int node : ball.nodes) sup_all = std::max(sup_all, std::abs(f[node]));
    if (sup_all > 1.0 + 1e-12)
        throw InvalidParameterError("flatness_diagnostic: field must be normalized");

    FlatnessReport rep;
    rep.eps = eps;
    rep.inf_u = std::numeric_limits<double>::infinity();
    int neg = 0;
    for (int node : ball.nodes) {
        rep.inf_u = std::min(rep.inf_u, f[node]);
        if (f[node] < 0.0) ++neg;
    }
    rep.neg_density = double(neg) / double(ball.nodes.size());
    const BallIndex half = ball_nodes(g, center, 0.5 * r0);
    for (int node : half.nodes) rep.sup_half = std::max(rep.sup_half, std::abs(f[node]));
    return rep;
}

// ---------------------------------------------------------------------------
// Center selection
// ---------------------------------------------------------------------------

/// Auto-detected analysis center: a critical node sitting on the edge of the
/// critical region (it must see a neighbor with u above tau_u within the
/// detection radius), preferring interior depth, then closeness to the
/// origin, then index. Falls back to the deepest critical node when the
/// whole region is flat.
inline int select_auto_center(const ScalarField& f, const StencilSet& s,
                              double tau_u, double tau_g, double rho_b) {
    const CriticalSet cs = detect_critical_set(f, s, tau_u, tau_g);
    if (cs.nodes.empty())
        throw InsufficientDataError("select_auto_center: critical set is empty");
    const Grid2D& g = f.grid;
    const int reach = static_cast<int>(std::floor(rho_b / g.h)) + 1;

    auto has_grown_neighbor = [&](int node) {
        const int cx = node % g.n, cy = node / g.n;
        for (int dy = -reach; dy <= reach; ++dy) {
            for (int dx = -reach; dx <= reach; ++dx) {
                const int ix = cx + dx, iy = cy + dy;
                if (ix < 0 || iy < 0 || ix >= g.n || iy >= g.n) continue;
                if ((g.h * g.h) * (double(dx) * dx + double(dy) * dy) > rho_b * rho_b)
                    continue;
                if (f.at(ix, iy) > tau_u) return true;
            }
        }
        return false;
    };

    auto better = [&](int a, int b) { // true when a is preferred over b
        const int da = g.boundary_depth(a), db = g.boundary_depth(b);
        if (da != db) return da > db;
        const double ra = norm(g.coord(a)), rb = norm(g.coord(b));
        if (ra != rb) return ra < rb;
        return a < b;
    };

    int best_edge = -1, best_any = -1;
    for (int node : cs.nodes) {
        if (best_any < 0 || better(node, best_any)) best_any = node;
        if (has_grown_neighbor(node) && (best_edge < 0 || better(node, best_edge)))
            best_edge = node;
    }
    return best_edge >= 0 ? best_edge : best_any;
}

} // namespace inflap
