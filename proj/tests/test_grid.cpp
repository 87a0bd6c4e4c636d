#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "inflap/grid.hpp"

using namespace inflap;

TEST_CASE("build_grid spacing and origin") {
    const Grid2D g = build_grid(17, 1.0);
    CHECK(g.h == 0.125);
    CHECK(g.n == 17);
    const Vec2 o = g.coord(g.center_index());
    CHECK(o.x == 0.0);
    CHECK(o.y == 0.0);

    const Grid2D fine = build_grid(129, 1.0);
    CHECK(fine.h == 0.015625);

    CHECK_THROWS_AS(build_grid(16, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_grid(15, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_grid(33, 0.0), InvalidParameterError);
}

TEST_CASE("node coordinates reproduce by index arithmetic") {
    const Grid2D g = build_grid(33, 2.0);
    CHECK(g.coord(0, 0).x == -2.0);
    CHECK(g.coord(g.n - 1, 0).x == 2.0);
    CHECK(g.coord(5, 7).x == -2.0 + 5 * g.h);
    CHECK(g.coord(5, 7).y == -2.0 + 7 * g.h);
    CHECK(g.on_boundary(0, 3));
    CHECK(g.on_boundary(3, g.n - 1));
    CHECK_FALSE(g.on_boundary(1, 1));
    CHECK(g.boundary_depth(1, 5) == 1);
    CHECK(g.boundary_depth(16, 16) == 16);
}

TEST_CASE("build_stencil direction sets") {
    const StencilSet s1 = build_stencil(1);
    REQUIRE(s1.count() == 8);
    std::set<std::pair<int, int>> got;
    for (const StencilDir& d : s1.dirs) got.insert({d.p, d.q});
    const std::set<std::pair<int, int>> want = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                                {1, 1},  {-1, 1}, {1, -1}, {-1, -1}};
    CHECK(got == want);
    // axis directions sort first so affine tie-breaks land on unit arms
    CHECK(s1.dirs[0].p == 1);
    CHECK(s1.dirs[0].q == 0);
    CHECK(s1.dirs[0].len == 1.0);

    const StencilSet s2 = build_stencil(2);
    REQUIRE(s2.count() == 16);
    std::set<std::pair<int, int>> got2;
    for (const StencilDir& d : s2.dirs) got2.insert({d.p, d.q});
    for (auto pq : want) CHECK(got2.count(pq) == 1);
    for (auto pq : {std::pair{1, 2}, {2, 1}, {-1, 2}, {-2, 1}, {1, -2}, {2, -1},
                    {-1, -2}, {-2, -1}})
        CHECK(got2.count(pq) == 1);

    CHECK_THROWS_AS(build_stencil(0), InvalidParameterError);
    CHECK_THROWS_AS(build_stencil(5), InvalidParameterError);
}

TEST_CASE("stencil invariants: antipodal closure, primitive directions") {
    for (int w = 1; w <= 4; ++w) {
        const StencilSet s = build_stencil(w);
        for (int i = 0; i < s.count(); ++i) {
            const int j = s.antipode[i];
            REQUIRE(j >= 0);
            CHECK(s.dirs[j].p == -s.dirs[i].p);
            CHECK(s.dirs[j].q == -s.dirs[i].q);
            CHECK(s.dirs[j].len == s.dirs[i].len);
        }
        // no two directions are positive multiples of each other
        for (int i = 0; i < s.count(); ++i) {
            for (int j = i + 1; j < s.count(); ++j) {
                const auto& a = s.dirs[i];
                const auto& b = s.dirs[j];
                const bool parallel = a.p * b.q - a.q * b.p == 0;
                const bool same_sense = a.p * b.p + a.q * b.q > 0;
                CHECK_FALSE((parallel && same_sense));
            }
        }
    }
}

TEST_CASE("ball_nodes membership examples") {
    const Grid2D g = build_grid(17, 1.0); // h = 0.125
    const int origin = g.center_index();

    const BallIndex five = ball_nodes(g, origin, 0.13);
    CHECK(five.nodes.size() == 5); // origin + 4 axis neighbors

    const BallIndex one = ball_nodes(g, origin, 0.05);
    REQUIRE(one.nodes.size() == 1);
    CHECK(one.nodes[0] == origin);

    CHECK_THROWS_AS(ball_nodes(g, origin, 1.1), OutOfDomainError);
    CHECK_THROWS_AS(ball_nodes(g, origin, -0.5), InvalidParameterError);
    CHECK_THROWS_AS(ball_nodes(g, g.idx(0, 3), 0.05), OutOfDomainError);
}

TEST_CASE("ball_nodes equals brute-force scan") {
    std::mt19937 rng(20240811);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 17 + 2 * (rng() % 12);
        const Grid2D g = build_grid(n, 1.0 + 0.5 * (rng() % 3));
        std::uniform_int_distribution<int> pick(1, g.n - 2);
        const int cx = pick(rng), cy = pick(rng);
        const int center = g.idx(cx, cy);
        std::uniform_real_distribution<double> rad(0.5 * g.h, 0.6 * g.half_width);
        const double r = rad(rng);

        std::vector<int> brute;
        bool touches = false;
        for (int node = 0; node < g.size(); ++node) {
            if (norm(g.coord(node) - g.coord(center)) <= r) {
                if (g.on_boundary(node)) touches = true;
                brute.push_back(node);
            }
        }
        if (touches) {
            CHECK_THROWS_AS(ball_nodes(g, center, r), OutOfDomainError);
            continue;
        }
        BallIndex ball = ball_nodes(g, center, r);
        std::sort(ball.nodes.begin(), ball.nodes.end());
        CHECK(ball.nodes == brute);
    }
}
