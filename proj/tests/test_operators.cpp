#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "inflap/operators.hpp"

using namespace inflap;

namespace {

ScalarField fill(const Grid2D& g, double (*fn)(Vec2)) {
    ScalarField f(g);
    for (int node = 0; node < g.size(); ++node) f[node] = fn(g.coord(node));
    return f;
}

ScalarField random_field(const Grid2D& g, std::mt19937& rng) {
    ScalarField f(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : f.values) v = u(rng);
    return f;
}

// the 8 symmetries of the square acting on node indices
int map_node(const Grid2D& g, int node, int sym) {
    const int c = g.n - 1;
    int ix = node % g.n, iy = node / g.n;
    if (sym & 1) ix = c - ix;
    if (sym & 2) iy = c - iy;
    if (sym & 4) std::swap(ix, iy);
    return g.idx(ix, iy);
}

constexpr double kTol = 1e-12;

} // namespace

TEST_CASE("grad_magnitude on reference fields") {
    const Grid2D g = build_grid(17, 1.0);
    const StencilSet s1 = build_stencil(1);
    const StencilSet s2 = build_stencil(2);
    const int origin = g.center_index();

    SECTION("axis-aligned affine gives exact slope") {
        ScalarField f = fill(g, [](Vec2 x) { return 2.0 * x.x + 1.0; });
        CHECK(std::abs(grad_magnitude(f, s1, origin) - 2.0) < kTol);
        CHECK(std::abs(grad_magnitude(f, s2, origin) - 2.0) < kTol);
        CHECK(std::abs(grad_magnitude(f, s2, g.idx(3, 11)) - 2.0) < kTol);
    }

    SECTION("stencil-ray affine gives exact slope") {
        // slope (1,2) lies on a W=2 ray
        ScalarField f = fill(g, [](Vec2 x) { return x.x + 2.0 * x.y; });
        CHECK(std::abs(grad_magnitude(f, s2, origin) - std::sqrt(5.0)) < kTol);
    }

    SECTION("constant field") {
        ScalarField f = fill(g, [](Vec2) { return 3.5; });
        CHECK(grad_magnitude(f, s1, origin) == 0.0);
    }

    SECTION("|x1| chord value at the kink") {
        // value extremes: 0.125 on the first axis direction, 0 on the
        // second axis; chord (0.125 - 0) / (0.125 + 0.125) = 0.5
        ScalarField f = fill(g, [](Vec2 x) { return std::abs(x.x); });
        CHECK(std::abs(grad_magnitude(f, s1, origin) - 0.5) < kTol);
    }

    SECTION("never negative on random fields") {
        std::mt19937 rng(5);
        for (int t = 0; t < 20; ++t) {
            ScalarField f = random_field(g, rng);
            for (int iy = 2; iy < g.n - 2; iy += 3)
                for (int ix = 2; ix < g.n - 2; ix += 3)
                    CHECK(grad_magnitude(f, s2, g.idx(ix, iy)) >= 0.0);
        }
    }

    SECTION("boundary node rejected") {
        ScalarField f = fill(g, [](Vec2 x) { return x.x; });
        CHECK_THROWS_AS(grad_magnitude(f, s1, g.idx(0, 5)), OutOfDomainError);
        CHECK_THROWS_AS(grad_magnitude(f, s2, g.idx(1, 5)), OutOfDomainError);
    }
}

TEST_CASE("normalized operator on reference fields") {
    const StencilSet s1 = build_stencil(1);
    const StencilSet s2 = build_stencil(2);

    SECTION("|x|^2 gives exactly 2 at the vertex") {
        for (int n : {17, 33}) {
            const Grid2D g = build_grid(n, 1.0);
            ScalarField f = fill(g, [](Vec2 x) { return x.x * x.x + x.y * x.y; });
            CHECK(std::abs(normalized_inf_laplacian(f, s1, g.center_index()) - 2.0) <
                  kTol);
            CHECK(std::abs(normalized_inf_laplacian(f, s2, g.center_index()) - 2.0) <
                  kTol);
        }
    }

    SECTION("affine fields are exact zeros") {
        const Grid2D g = build_grid(17, 1.0);
        ScalarField f = fill(g, [](Vec2 x) { return 0.7 * x.x - 1.3 * x.y + 0.2; });
        for (int iy = 2; iy < g.n - 2; ++iy)
            for (int ix = 2; ix < g.n - 2; ++ix)
                CHECK(std::abs(normalized_inf_laplacian(f, s2, g.idx(ix, iy))) < kTol);
    }
}

TEST_CASE("LocalStencilSample extreme indices") {
    const Grid2D g = build_grid(17, 1.0);
    const StencilSet s = build_stencil(1);
    ScalarField f = fill(g, [](Vec2) { return 0.0; });
    const int origin = g.center_index();
    const int cx = (g.n - 1) / 2;

    // raise one diagonal neighbor: slope max there, tie on the rest
    f.at(cx + 1, cx + 1) = 0.25;
    const LocalStencilSample sm = sample_stencil(f, s, origin);
    CHECK(sm.count == 8);
    CHECK(s.dirs[sm.argmax].p == 1);
    CHECK(s.dirs[sm.argmax].q == 1);
    CHECK(sm.argmin == 0); // all-zero slopes tie; lowest index wins
}

TEST_CASE("direct and gamma-family compose the gradient factor") {
    const Grid2D g = build_grid(17, 1.0);
    const StencilSet s = build_stencil(2);
    std::mt19937 rng(17);
    ScalarField f = random_field(g, rng);
    const int node = g.idx(8, 8);
    const double ln = normalized_inf_laplacian(f, s, node);
    const double gh = grad_magnitude(f, s, node);
    CHECK(std::abs(inf_laplacian(f, s, node, OperatorKind::direct()) - gh * gh * ln) <
          kTol);
    CHECK(inf_laplacian(f, s, node, OperatorKind::normalized()) == ln);
    const double g05 = inf_laplacian(f, s, node, OperatorKind::gamma_family(0.5));
    CHECK(std::abs(g05 - std::pow(gh, 1.5) * ln) < 1e-12 * std::max(1.0, std::abs(g05)));
    CHECK(inf_laplacian(f, s, node, OperatorKind::gamma_family(0.0)) ==
          inf_laplacian(f, s, node, OperatorKind::direct()));
    CHECK(inf_laplacian(f, s, node, OperatorKind::gamma_family(2.0)) == ln);
    CHECK_THROWS_AS(OperatorKind::gamma_family(2.5), InvalidParameterError);
}

TEST_CASE("operator identities on random fields") {
    const Grid2D g = build_grid(17, 1.0);
    const StencilSet s = build_stencil(2);
    std::mt19937 rng(20240202);
    std::uniform_real_distribution<double> scale(0.1, 4.0), shift(-2.0, 2.0),
        bump(0.0, 1.0);
    std::uniform_int_distribution<int> pick(2, g.n - 3), dir(0, s.count() - 1),
        sym(0, 7);

    for (int trial = 0; trial < 60; ++trial) {
        ScalarField f = random_field(g, rng);
        const int node = g.idx(pick(rng), pick(rng));

        {
            // cubic homogeneity (direct), linear (normalized), 3-gamma family
            const double sc = scale(rng);
            ScalarField fs = f;
            for (double& v : fs.values) v *= sc;
            const double l0 = normalized_inf_laplacian(f, s, node);
            const double l1 = normalized_inf_laplacian(fs, s, node);
            CHECK(std::abs(l1 - sc * l0) < kTol * std::max(1.0, std::abs(sc * l0)));
            const double d0 = inf_laplacian(f, s, node, OperatorKind::direct());
            const double d1 = inf_laplacian(fs, s, node, OperatorKind::direct());
            CHECK(std::abs(d1 - sc * sc * sc * d0) <
                  1e-12 * std::max(1.0, std::abs(sc * sc * sc * d0)));
            const OperatorKind gk = OperatorKind::gamma_family(0.75);
            const double ga = inf_laplacian(f, s, node, gk);
            const double gb = inf_laplacian(fs, s, node, gk);
            CHECK(std::abs(gb - std::pow(sc, 2.25) * ga) <
                  1e-11 * std::max(1.0, std::abs(gb)));

            // constant invariance
            const double c = shift(rng);
            ScalarField fc = f;
            for (double& v : fc.values) v += c;
            CHECK(std::abs(normalized_inf_laplacian(fc, s, node) - l0) <
                  kTol * std::max(1.0, std::abs(l0)));
            CHECK(std::abs(inf_laplacian(fc, s, node, OperatorKind::direct()) - d0) <
                  kTol * std::max(1.0, std::abs(d0)));

            // monotonicity: raising one neighbor never lowers the normalized value
            const int k = dir(rng);
            ScalarField fm = f;
            fm.at(node % g.n + s.dirs[k].p, node / g.n + s.dirs[k].q) += bump(rng);
            CHECK(normalized_inf_laplacian(fm, s, node) >= l0 - 1e-14);

            // equivariance under a lattice symmetry
            const int sg = sym(rng);
            ScalarField ft(g);
            for (int m = 0; m < g.size(); ++m) ft[map_node(g, m, sg)] = f[m];
            const double lsym = normalized_inf_laplacian(ft, s, map_node(g, node, sg));
            CHECK(std::abs(lsym - l0) < kTol * std::max(1.0, std::abs(l0)));
        }
    }
}

TEST_CASE("residual_field reference values") {
    const Grid2D g = build_grid(17, 1.0);
    const StencilSet s = build_stencil(2);

    SECTION("constant field against G = 1 gives -1") {
        ScalarField f = fill(g, [](Vec2) { return 0.4; });
        const RhsModel one = RhsModel::general(0.0, 0.0, WeightSpec::constant(1.0));
        const ScalarField r = residual_field(f, s, one, OperatorKind::direct());
        for (int iy = 0; iy < g.n; ++iy) {
            for (int ix = 0; ix < g.n; ++ix) {
                if (g.on_boundary(ix, iy)) CHECK(r.at(ix, iy) == 0.0);
                else CHECK(std::abs(r.at(ix, iy) + 1.0) < kTol);
            }
        }
    }

    SECTION("affine fields are scheme-exact zeros of the homogeneous equation") {
        ScalarField f = fill(g, [](Vec2 x) { return 1.2 * x.x - 0.4 * x.y; });
        CHECK(residual_sup(f, s, RhsModel::zero(), OperatorKind::direct()) < kTol);
    }
}
