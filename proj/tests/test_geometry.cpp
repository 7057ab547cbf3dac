#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skodom/geometry.hpp"

using namespace skodom;

namespace {

Distribution bernoulli() { return Distribution::atoms({{-1.0, 0.5}, {1.0, 0.5}}); }
Distribution three_atom() {
    return Distribution::atoms({{-1.0, 0.4}, {0.0, 0.4}, {2.0, 0.2}});
}

RegionPolygon unit_square() {
    return RegionPolygon::make({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, 1.0);
}

}  // namespace

TEST_CASE("make: orientation normalized, caps flagged") {
    auto r = RegionPolygon::make({{-1, 1}, {1, 1}, {1, -1}, {-1, -1}}, 1.0);  // given CW
    CHECK(r.vertices.size() == 4);
    double area2 = 0.0;
    for (size_t i = 0; i < 4; ++i) {
        auto a = r.vertices[i], b = r.vertices[(i + 1) % 4];
        area2 += a[0] * b[1] - b[0] * a[1];
    }
    CHECK(area2 > 0.0);  // CCW after normalization
    int caps = 0;
    for (auto c : r.edge_is_cap) caps += c;
    CHECK(caps == 2);  // top and bottom horizontals sit at +-y_max
}

TEST_CASE("contains and boundary_distance on the unit square") {
    auto r = unit_square();
    CHECK(contains(r, {0.0, 0.0}));
    CHECK(contains(r, {0.9, -0.9}));
    CHECK(!contains(r, {1.5, 0.0}));
    CHECK(!contains(r, {1.0, 0.0}));  // on the boundary counts as outside
    CHECK(boundary_distance(r, {0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(boundary_distance(r, {0.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(boundary_distance(r, {2.0, 0.0}), std::invalid_argument);
    CHECK(polygon_area(r) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("bernoulli steps polygon is the rectangle [-1,1]x[-Y,Y]") {
    auto p = step_profile(bernoulli());
    auto tips = ray_tips(p);
    const double Y = default_y_max(bernoulli(), tips);
    CHECK(Y == doctest::Approx(10.0).epsilon(1e-12));
    auto r = polygonize_steps(p, tips, Y, {0.0, 0.0});
    CHECK(polygon_area(r) == doctest::Approx(2.0 * 2.0 * Y).epsilon(1e-12));
    for (const auto& v : r.vertices) {
        CHECK(std::abs(v[0]) == 1.0);
        CHECK(std::abs(v[1]) <= Y);
    }
    CHECK(contains(r, {0.0, 9.99}));
    CHECK(!contains(r, {0.0, 10.01}));
    CHECK(boundary_distance(r, {0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three-atom polygon carries a slit above and below the middle atom") {
    auto p = step_profile(three_atom());
    auto tips = ray_tips(p);
    REQUIRE(tips.size() == 3);
    const double tip = tips[1].tip_y;
    REQUIRE(std::isfinite(tip));
    auto r = polygonize_steps(p, tips, 12.0, {0.0, 0.0});
    // slit line x = 0: blocked above the tip, open below it
    CHECK(contains(r, {0.0, 0.5 * tip}));
    CHECK(!contains(r, {0.0, tip + 0.5}));        // on the slit segment
    CHECK(contains(r, {0.05, tip + 0.5}));        // just beside the slit
    CHECK(contains(r, {0.0, -0.5 * tip}));
    CHECK(!contains(r, {0.0, -tip - 0.5}));
    // distance from the center to the slit tip region
    CHECK(boundary_distance(r, {0.0, 0.0}) == doctest::Approx(tip).epsilon(1e-9));
    CHECK_THROWS_AS(polygonize_steps(p, tips, 0.5 * tip, Point{0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("generic polygonize caps an artificially diverged bernoulli trace") {
    auto d = bernoulli();
    auto s = cosine_coefficients(d, 4096);
    // cap low enough that the near-slit samples register as diverged
    auto c = trace(s, d, 2001, std::nullopt, 2.0);
    int diverged = 0;
    for (const auto& smp : c.samples) diverged += smp.diverged;
    CHECK(diverged > 0);
    auto r = polygonize(c, 6.0, {0.0, 0.0});
    CHECK(r.y_max == 6.0);
    CHECK(contains(r, {0.0, 0.0}));
    // all x stay within the support
    for (const auto& v : r.vertices) CHECK(std::abs(v[0]) <= 1.0 + 1e-12);
    // caps present at +-6
    int caps = 0;
    for (auto f : r.edge_is_cap) caps += f;
    CHECK(caps >= 2);
    CHECK(polygon_area(r) > 0.8 * 2.0 * 12.0);  // close to the full rectangle
}

TEST_CASE("polygonize of a clean closed trace reproduces the curve") {
    auto d = Distribution::uniform(-1.0, 1.0);
    auto s = cosine_coefficients(d, 4096);
    auto c = trace(s, d, 2001);
    auto r = polygonize(c, default_y_max(d), {0.0, 0.0});
    CHECK(contains(r, {0.0, 0.0}));
    int caps = 0;
    for (auto f : r.edge_is_cap) caps += f;
    CHECK(caps == 0);
    // lens-shaped: area below the bounding box 2 x 2*max|y|
    CHECK(polygon_area(r) > 0.1);
    CHECK(polygon_area(r) < 4.0);
}

TEST_CASE("region json round trip") {
    auto r = unit_square();
    auto j = r.to_json();
    auto back = RegionPolygon::from_json(j);
    CHECK(back.vertices == r.vertices);
    CHECK(back.y_max == r.y_max);
    CHECK(back.edge_is_cap == r.edge_is_cap);
    auto bad = j;
    bad["extra"] = 1;
    CHECK_THROWS_AS(RegionPolygon::from_json(bad), std::invalid_argument);
}

TEST_CASE("default_y_max floors at 10 and tracks tips") {
    CHECK(default_y_max(Distribution::uniform(-1.0, 1.0)) == 10.0);
    RayTip big{0.0, 0.5, 7.0};
    const double v = default_y_max(bernoulli(), {big});
    CHECK(v == doctest::Approx(8.0 + 7.0).epsilon(1e-12));
}

TEST_CASE("polygonize rejects a start point outside") {
    auto r_throw = [] {
        auto p = step_profile(bernoulli());
        auto tips = ray_tips(p);
        polygonize_steps(p, tips, 10.0, {5.0, 0.0});
    };
    CHECK_THROWS_AS(r_throw(), std::runtime_error);
}
