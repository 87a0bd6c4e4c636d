#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "inflap/errors.hpp"

namespace inflap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }

/// Square lattice over [-L,L]^2. The node count per axis is odd, so the
/// origin is the exact center node and all coordinates are reproduced by
/// index arithmetic: x_ij = (-L + i*h, -L + j*h), h = 2L/(n-1).
struct Grid2D {
    int n = 0;               ///< nodes per side (odd, >= 17)
    double half_width = 0.0; ///< L
    double h = 0.0;          ///< spacing 2L/(n-1)

    int size() const { return n * n; }
    int idx(int ix, int iy) const { return iy * n + ix; }
    int center_index() const { return idx((n - 1) / 2, (n - 1) / 2); }

    Vec2 coord(int ix, int iy) const {
        return {-half_width + ix * h, -half_width + iy * h};
    }
    Vec2 coord(int node) const { return coord(node % n, node / n); }

    bool on_boundary(int ix, int iy) const {
        return ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1;
    }
    bool on_boundary(int node) const { return on_boundary(node % n, node / n); }

    /// Node-count distance to the lattice boundary (0 on the boundary).
    int boundary_depth(int ix, int iy) const {
        return std::min(std::min(ix, iy), std::min(n - 1 - ix, n - 1 - iy));
    }
    int boundary_depth(int node) const { return boundary_depth(node % n, node / n); }

    bool same_layout(const Grid2D& o) const {
        return n == o.n && half_width == o.half_width;
    }
};

inline Grid2D build_grid(int n_per_side, double half_width) {
    if (n_per_side < 17)
        throw InvalidParameterError("grid: n_per_side must be >= 17, got " +
                                    std::to_string(n_per_side));
    if (n_per_side % 2 == 0)
        throw InvalidParameterError("grid: n_per_side must be odd, got " +
                                    std::to_string(n_per_side));
    if (!(half_width > 0.0))
        throw InvalidParameterError("grid: half_width must be positive");
    Grid2D g;
    g.n = n_per_side;
    g.half_width = half_width;
    g.h = 2.0 * half_width / (n_per_side - 1);
    return g;
}

/// One lattice direction of a wide stencil: primitive offset (p,q) with
/// unit arm length sqrt(p^2+q^2); the physical arm is h times that.
struct StencilDir {
    int p = 0;
    int q = 0;
    double len = 0.0;
};

/// Wide-stencil direction set of Chebyshev radius W. Directions are
/// primitive (gcd(|p|,|q|)=1), antipodally closed, and ordered by ring,
/// arm length, then angle, so axis directions come first. W=1 gives 8
/// directions, W=2 gives 16.
struct StencilSet {
    int width = 0;
    std::vector<StencilDir> dirs;
    std::vector<int> antipode; ///< index of (-p,-q) for each direction

    int count() const { return static_cast<int>(dirs.size()); }
    double arm(int k, double h) const { return dirs[k].len * h; }
};

inline StencilSet build_stencil(int width) {
    if (width < 1 || width > 4)
        throw InvalidParameterError("stencil: width must be in [1,4], got " +
                                    std::to_string(width));
    struct Raw {
        int p, q, ring;
        double len, angle;
    };
    std::vector<Raw> raw;
    for (int p = -width; p <= width; ++p) {
        for (int q = -width; q <= width; ++q) {
            if (p == 0 && q == 0) continue;
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            const int ring = std::max(std::abs(p), std::abs(q));
            double ang = std::atan2(static_cast<double>(q), static_cast<double>(p));
            if (ang < 0) ang += 2.0 * M_PI;
            raw.push_back({p, q, ring, std::sqrt(double(p * p + q * q)), ang});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
        if (a.ring != b.ring) return a.ring < b.ring;
        if (a.len != b.len) return a.len < b.len;
        return a.angle < b.angle;
    });

    StencilSet s;
    s.width = width;
    for (const Raw& r : raw) s.dirs.push_back({r.p, r.q, r.len});
    s.antipode.assign(s.dirs.size(), -1);
    for (int i = 0; i < s.count(); ++i) {
        for (int j = 0; j < s.count(); ++j) {
            if (s.dirs[j].p == -s.dirs[i].p && s.dirs[j].q == -s.dirs[i].q) {
                s.antipode[i] = j;
                break;
            }
        }
    }
    return s;
}

enum class FieldRole { solution, rhs_sample, residual, oracle };

/// Grid function: one value per node, row-major with ix fastest.
struct ScalarField {
    Grid2D grid;
    std::vector<double> values;
    FieldRole role = FieldRole::solution;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, FieldRole r = FieldRole::solution)
        : grid(g), values(static_cast<size_t>(g.size()), 0.0), role(r) {}

    double& at(int ix, int iy) { return values[grid.idx(ix, iy)]; }
    double at(int ix, int iy) const { return values[grid.idx(ix, iy)]; }
    double& operator[](int node) { return values[node]; }
    double operator[](int node) const { return values[node]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// All interior nodes within Euclidean distance r of a center node.
struct BallIndex {
    int center = -1;
    double radius = 0.0;
    std::vector<int> nodes;
};

/// Exact Euclidean membership scan. Throws OutOfDomainError if the ball
/// reaches a boundary node (the ball must sit in the open interior).
inline BallIndex ball_nodes(const Grid2D& grid, int center, double r) {
    if (!(r > 0.0)) throw InvalidParameterError("ball_nodes: radius must be positive");
    if (center < 0 || center >= grid.size())
        throw InvalidParameterError("ball_nodes: center node out of range");
    const int cx = center % grid.n;
    const int cy = center / grid.n;
    if (grid.on_boundary(cx, cy))
        throw OutOfDomainError("ball_nodes: center on lattice boundary");

    const int reach = static_cast<int>(std::floor(r / grid.h)) + 1;
    const double r2 = r * r;
    BallIndex ball;
    ball.center = center;
    ball.radius = r;
    for (int dy = -reach; dy <= reach; ++dy) {
        const int iy = cy + dy;
        for (int dx = -reach; dx <= reach; ++dx) {
            const int ix = cx + dx;
            const double d2 = (grid.h * grid.h) * (double(dx) * dx + double(dy) * dy);
            if (d2 > r2) continue;
            if (ix < 0 || iy < 0 || ix >= grid.n || iy >= grid.n || grid.on_boundary(ix, iy))
                throw OutOfDomainError("ball_nodes: ball touches the lattice boundary");
            ball.nodes.push_back(grid.idx(ix, iy));
        }
    }
    return ball;
}

} // namespace inflap
