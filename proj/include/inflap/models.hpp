#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "inflap/errors.hpp"
#include "inflap/grid.hpp"

namespace inflap {

// ---------------------------------------------------------------------------
// Weights f(x)
// ---------------------------------------------------------------------------

enum class WeightForm { constant, power_of_radius, dist_to_set };

/// Axis-aligned segment, used as a distance anchor.
struct Segment {
    Vec2 a, b;
};

/// Bounded continuous weight on the closed square: a constant c, a radial
/// power c*|x|^beta, or a distance power c*dist(x,F)^beta where F is a
/// finite set of points and axis-aligned segments.
struct WeightSpec {
    WeightForm form = WeightForm::constant;
    double c = 1.0;
    double beta = 0.0;
    std::vector<Vec2> points;
    std::vector<Segment> segments;

    static WeightSpec constant(double c) {
        if (!(c >= 0.0)) throw InvalidParameterError("weight: amplitude must be >= 0");
        WeightSpec w;
        w.form = WeightForm::constant;
        w.c = c;
        return w;
    }

    static WeightSpec power_of_radius(double c, double beta) {
        if (!(c >= 0.0)) throw InvalidParameterError("weight: amplitude must be >= 0");
        if (!(beta >= 0.0)) throw InvalidParameterError("weight: exponent must be >= 0");
        WeightSpec w;
        w.form = WeightForm::power_of_radius;
        w.c = c;
        w.beta = beta;
        return w;
    }

    static WeightSpec dist_to_set(double c, double beta, std::vector<Vec2> pts,
                                  std::vector<Segment> segs = {}) {
        if (!(c >= 0.0)) throw InvalidParameterError("weight: amplitude must be >= 0");
        if (!(beta >= 0.0)) throw InvalidParameterError("weight: exponent must be >= 0");
        if (pts.empty() && segs.empty())
            throw InvalidParameterError("weight: dist_to_set needs a nonempty anchor set");
        for (const Segment& s : segs)
            if (s.a.x != s.b.x && s.a.y != s.b.y)
                throw InvalidParameterError("weight: segments must be axis-aligned");
        WeightSpec w;
        w.form = WeightForm::dist_to_set;
        w.c = c;
        w.beta = beta;
        w.points = std::move(pts);
        w.segments = std::move(segs);
        return w;
    }

    double dist_to(Vec2 x) const {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& p : points) best = std::min(best, norm(x - p));
        for (const Segment& s : segments) {
            // axis-aligned: clamp the projection onto the segment
            const double lox = std::min(s.a.x, s.b.x), hix = std::max(s.a.x, s.b.x);
            const double loy = std::min(s.a.y, s.b.y), hiy = std::max(s.a.y, s.b.y);
            const Vec2 q{std::clamp(x.x, lox, hix), std::clamp(x.y, loy, hiy)};
            best = std::min(best, norm(x - q));
        }
        return best;
    }

    double eval(Vec2 x) const {
        switch (form) {
            case WeightForm::constant: return c;
            case WeightForm::power_of_radius:
                return beta == 0.0 ? c : c * std::pow(norm(x), beta);
            case WeightForm::dist_to_set:
                return beta == 0.0 ? c : c * std::pow(dist_to(x), beta);
        }
        return c;
    }
};

// ---------------------------------------------------------------------------
// Right-hand-side family G(x,u,p)
// ---------------------------------------------------------------------------

/// u_+^e with the strong-absorption convention (u_+)^0 = indicator{u > 0}.
inline double pos_pow(double u, double e) {
    if (u <= 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    if (e == 1.0) return u;
    if (e == 2.0) return u * u;
    return std::pow(u, e);
}

/// min{1, p^kappa} for p >= 0.
inline double min1_pow(double p, double kappa) {
    if (kappa == 0.0) return 1.0;
    if (p >= 1.0) return 1.0;
    if (p == 0.0) return 0.0;
    if (kappa == 1.0) return p;
    return std::pow(p, kappa);
}

/// |u|^m with |u|^0 = 1.
inline double abs_pow(double u, double m) {
    if (m == 0.0) return 1.0;
    if (m == 1.0) return std::abs(u);
    if (m == 2.0) return u * u;
    return std::pow(std::abs(u), m);
}

enum class RhsKind { zero, general, dead_core, henon_sum, obstacle };

/// One Henon-type summand c*dist(x,F)^beta * u_+^m * min{1,p^kappa}.
struct HenonTerm {
    WeightSpec dist_weight; ///< c and beta live here, form dist_to_set
    double m = 0.0;
    double kappa = 0.0;
};

/// The forcing family. Parameters are validated at construction; evaluation
/// is pure and allocation-free.
struct RhsModel {
    RhsKind kind = RhsKind::zero;
    double m = 0.0, kappa = 0.0;    // general
    WeightSpec weight;              // general / obstacle
    double lambda = 0.0, gamma = 0.0; // dead_core
    std::vector<HenonTerm> terms;   // henon_sum

    static RhsModel zero() { return RhsModel{}; }

    static RhsModel general(double m, double kappa, WeightSpec w) {
        if (!(m >= 0.0 && m < 3.0))
            throw InvalidParameterError("general: m must lie in [0,3)");
        if (!(kappa >= 0.0 && kappa < 4.0))
            throw InvalidParameterError("general: kappa must lie in [0,4)");
        if (!(m < 3.0 - kappa))
            throw InvalidParameterError("general: need m < 3 - kappa");
        RhsModel g;
        g.kind = RhsKind::general;
        g.m = m;
        g.kappa = kappa;
        g.weight = std::move(w);
        return g;
    }

    static RhsModel dead_core(double lambda, double gamma) {
        if (!(lambda > 0.0)) throw InvalidParameterError("dead_core: lambda must be > 0");
        if (!(gamma >= 0.0 && gamma < 3.0))
            throw InvalidParameterError("dead_core: gamma must lie in [0,3)");
        RhsModel g;
        g.kind = RhsKind::dead_core;
        g.lambda = lambda;
        g.gamma = gamma;
        return g;
    }

    static RhsModel henon_sum(std::vector<HenonTerm> terms) {
        if (terms.empty()) throw InvalidParameterError("henon_sum: needs at least one term");
        for (const HenonTerm& t : terms) {
            if (!(t.m >= 0.0 && t.kappa >= 0.0 && t.m + t.kappa < 3.0))
                throw InvalidParameterError("henon_sum: need m_i + kappa_i in [0,3)");
            if (!(t.dist_weight.beta > 0.0))
                throw InvalidParameterError("henon_sum: need beta_i > 0");
            if (t.dist_weight.form != WeightForm::dist_to_set)
                throw InvalidParameterError("henon_sum: term weight must be dist_to_set");
        }
        RhsModel g;
        g.kind = RhsKind::henon_sum;
        g.terms = std::move(terms);
        return g;
    }

    /// Obstacle forcing f(x). Only constant weights can certify the lower
    /// bound f >= m0 > 0 on the whole square exactly.
    static RhsModel obstacle(WeightSpec f) {
        if (f.form != WeightForm::constant || !(f.c > 0.0))
            throw InvalidParameterError(
                "obstacle: weight must be a constant bounded below by m0 > 0");
        RhsModel g;
        g.kind = RhsKind::obstacle;
        g.weight = std::move(f);
        return g;
    }

    bool is_obstacle() const { return kind == RhsKind::obstacle; }
};

/// G(x, u, |p|). For the obstacle model this returns f(x); the
/// complementarity is enforced by the solver.
inline double evaluate_rhs(const RhsModel& g, Vec2 x, double u_val, double p_mag) {
    if (!(p_mag >= 0.0)) throw InvalidParameterError("evaluate_rhs: p_mag must be >= 0");
    switch (g.kind) {
        case RhsKind::zero: return 0.0;
        case RhsKind::general:
            return g.weight.eval(x) * abs_pow(u_val, g.m) * min1_pow(p_mag, g.kappa);
        case RhsKind::dead_core: return g.lambda * pos_pow(u_val, g.gamma);
        case RhsKind::henon_sum: {
            double sum = 0.0;
            for (const HenonTerm& t : g.terms)
                sum += t.dist_weight.eval(x) * pos_pow(u_val, t.m) *
                       min1_pow(p_mag, t.kappa);
            return sum;
        }
        case RhsKind::obstacle: return g.weight.eval(x);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Closed-form exponents
// ---------------------------------------------------------------------------

/// Growth parameters (m, kappa), an optional weight exponent beta, and an
/// optional homogeneity gamma for the |Du|^{-gamma} operator family.
struct ExponentParams {
    double m = 0.0;
    double kappa = 0.0;
    std::optional<double> beta;
    std::optional<double> gamma;

    double kappa_eff() const { return kappa + gamma.value_or(0.0); }
};

/// Membership in the compatibility set: m in [0,3), kappa in [0,4) and
/// m < 3 - kappa, with kappa+gamma in place of kappa when gamma is set.
inline bool admissible(const ExponentParams& p) {
    if (p.gamma && !(*p.gamma >= 0.0 && *p.gamma <= 2.0)) return false;
    const double k = p.kappa_eff();
    return p.m >= 0.0 && p.m < 3.0 && k >= 0.0 && k < 4.0 && p.m < 3.0 - k;
}

/// Sharp growth exponent (4-kappa)/(3-(m+kappa)), always > 1 on the
/// admissible set.
inline double alpha_exponent(const ExponentParams& p) {
    if (!admissible(p))
        throw InvalidParameterError("alpha_exponent: parameters not admissible");
    const double k = p.kappa_eff();
    return (4.0 - k) / (3.0 - (p.m + k));
}

/// Weighted exponent (4-kappa+beta)/(3-(m+kappa)) for forcing that decays
/// like dist^beta toward the analysis point.
inline double weighted_exponent(const ExponentParams& p) {
    if (!admissible(p))
        throw InvalidParameterError("weighted_exponent: parameters not admissible");
    const double b = p.beta.value_or(0.0);
    if (!(b >= 0.0)) throw InvalidParameterError("weighted_exponent: beta must be >= 0");
    const double k = p.kappa_eff();
    return (4.0 - k + b) / (3.0 - (p.m + k));
}

struct HenonExponentTerm {
    double beta = 0.0;
    double kappa = 0.0;
    double m = 0.0;
};

/// Multi-term minimum rule: min_i { (4+beta_i-kappa_i)/(3-(m_i+kappa_i)),
/// (4+sigma_i)/3 } over the summands and noise exponents.
inline double henon_min_exponent(const std::vector<HenonExponentTerm>& terms,
                                 const std::vector<double>& sigmas) {
    if (terms.empty())
        throw InvalidParameterError("henon_min_exponent: empty term list");
    double best = std::numeric_limits<double>::infinity();
    for (const HenonExponentTerm& t : terms) {
        ExponentParams p;
        p.m = t.m;
        p.kappa = t.kappa;
        if (!admissible(p))
            throw InvalidParameterError("henon_min_exponent: term not admissible");
        if (!(t.beta >= 0.0))
            throw InvalidParameterError("henon_min_exponent: beta must be >= 0");
        best = std::min(best, (4.0 + t.beta - t.kappa) / (3.0 - (t.m + t.kappa)));
    }
    for (double s : sigmas) {
        if (!(s >= 0.0))
            throw InvalidParameterError("henon_min_exponent: sigma must be >= 0");
        best = std::min(best, (4.0 + s) / 3.0);
    }
    return best;
}

/// Cap exponent (1+m)/(3-(m+kappa)); equals alpha_exponent - 1 exactly.
inline double alpha_hat_cap(const ExponentParams& p) {
    if (!admissible(p))
        throw InvalidParameterError("alpha_hat_cap: parameters not admissible");
    const double k = p.kappa_eff();
    return (1.0 + p.m) / (3.0 - (p.m + k));
}

/// Cube root of theta / (alpha^3 (alpha-1)): the sharp non-degeneracy
/// lower-bound constant.
inline double nondegeneracy_constant(double theta, double alpha) {
    if (!(theta > 0.0))
        throw InvalidParameterError("nondegeneracy_constant: theta must be > 0");
    if (!(alpha > 1.0))
        throw InvalidParameterError("nondegeneracy_constant: alpha must be > 1");
    return std::cbrt(theta / (alpha * alpha * alpha * (alpha - 1.0)));
}

struct RadialConstant {
    double sigma = 0.0; ///< growth power
    double K = 0.0;     ///< amplitude
};

/// Exact radial profile K r^sigma solving the weighted absorption equation
/// with Thiele modulus lambda, absorption gamma, and weight power alpha_w:
/// sigma = (4+alpha_w)/(3-gamma) and K^3 sigma^3 (sigma-1) = lambda K^gamma.
inline RadialConstant deadcore_radial_constant(double lambda, double gamma,
                                               double alpha_w) {
    if (!(lambda > 0.0))
        throw InvalidParameterError("deadcore_radial_constant: lambda must be > 0");
    if (!(gamma >= 0.0 && gamma < 3.0))
        throw InvalidParameterError("deadcore_radial_constant: gamma must lie in [0,3)");
    if (!(alpha_w >= 0.0))
        throw InvalidParameterError("deadcore_radial_constant: alpha_w must be >= 0");
    RadialConstant rc;
    rc.sigma = (4.0 + alpha_w) / (3.0 - gamma);
    const double num = lambda * std::pow(3.0 - gamma, 4.0);
    const double den = std::pow(4.0 + alpha_w, 3.0) * (1.0 + alpha_w + gamma);
    rc.K = std::pow(num / den, 1.0 / (3.0 - gamma));
    return rc;
}

} // namespace inflap
