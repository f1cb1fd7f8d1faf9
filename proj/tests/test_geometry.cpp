#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gapkit/geometry.hpp"
#include "gapkit/rng.hpp"

using namespace gapkit;
using Catch::Approx;

namespace {

SymmetricConvexDomain hexagon() { return SymmetricConvexDomain::polygonal({{0, 1}, {0.1, 1}, {1, 0.1}}); }

std::vector<SymmetricConvexDomain> zoo() {
    return {SymmetricConvexDomain::rectangle(1, 1),    SymmetricConvexDomain::rectangle(0.6, 1),
            SymmetricConvexDomain::diamond(1, 1),      SymmetricConvexDomain::ellipse(1, 0.7),
            SymmetricConvexDomain::stadium(1, 0.6),    SymmetricConvexDomain::stadium(0.5, 1),
            SymmetricConvexDomain::superellipse(1, 1, 3.5), hexagon()};
}

}  // namespace

TEST_CASE("membership of sample points") {
    const auto sq = SymmetricConvexDomain::rectangle(1, 1);
    const auto dia = SymmetricConvexDomain::diamond(1, 1);
    CHECK(sq.contains({0, 0}));
    CHECK_FALSE(dia.contains({0.6, 0.6}));
    CHECK(dia.contains({0.6, 0.3}));
    // open sets
    CHECK_FALSE(sq.contains({1, 0}));
    CHECK_FALSE(dia.contains({0.5, 0.5}));
    CHECK_FALSE(SymmetricConvexDomain::ellipse(1, 1).contains({0.6, 0.8}));
}

TEST_CASE("corner region") {
    const CornerRegion th{1, 1};
    CHECK(theta_contains(th, {0.5, 0.5}));
    CHECK_FALSE(theta_contains(th, {0.5, 0.49}));
    CHECK_FALSE(theta_contains(th, {0.5, 1.0}));
    CHECK_FALSE(theta_contains(th, {0.0, 1.0 - 1e-9}));
}

TEST_CASE("excluded witness") {
    const auto dia = SymmetricConvexDomain::diamond(1, 1);
    CHECK(excluded_witness(dia, {0.5, 0.6}));
    CHECK_FALSE(excluded_witness(dia, {0.3, 0.5}));
    // boundary point is in the closure
    CHECK_FALSE(excluded_witness(dia, {0.5, 0.5}));
    const auto sq = SymmetricConvexDomain::rectangle(1, 1);
    CHECK_FALSE(excluded_witness(sq, {0.5, 0.6}));
    CHECK_FALSE(excluded_witness(sq, {0.99, 0.99}));
    CHECK(excluded_witness(hexagon(), {0.5, 0.625}));
}

TEST_CASE("boundary distance") {
    const auto sq = SymmetricConvexDomain::rectangle(1, 1);
    CHECK(boundary_distance(sq, {0, 0}) == Approx(1.0));
    CHECK(boundary_distance(sq, {0.5, 0}, Half::right) == Approx(0.5));
    CHECK(boundary_distance(SymmetricConvexDomain::diamond(1, 1), {0, 0}) == Approx(1 / std::sqrt(2.0)));
    CHECK(boundary_distance(SymmetricConvexDomain::ellipse(1, 1), {0.3, 0.4}) == Approx(0.5).margin(1e-9));
    CHECK_THROWS_AS(boundary_distance(sq, {1.5, 0}), Error);
    CHECK_THROWS_AS(boundary_distance(sq, {-0.5, 0}, Half::right), Error);
}

TEST_CASE("reflection symmetry of membership on random points") {
    const CounterRng rng(11, 0);
    for (const auto& d : zoo()) {
        int mismatches = 0;
        for (std::uint64_t k = 0; k < 10000; ++k) {
            const double x = 2.4 * rng.uniform(2 * k) - 1.2, y = 2.4 * rng.uniform(2 * k + 1) - 1.2;
            const bool c = d.contains({x, y});
            mismatches += c != d.contains({-x, y}) || c != d.contains({x, -y}) || c != d.contains({-x, -y});
            // inside the bounding rectangle
            if (c) mismatches += !(std::abs(x) < d.a() && std::abs(y) < d.b());
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("profile is concave and nonincreasing on a sample grid") {
    for (const auto& d : zoo()) {
        CHECK(d.height(0) == Approx(d.b()));
        double prev = d.height(0), prev_slope = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double x = d.a() * i / 200.0, f = d.height(x);
            const double slope = (f - prev) * 200.0 / d.a();
            CHECK(f <= prev + 1e-12);
            CHECK(slope <= prev_slope + 1e-6);
            prev = f, prev_slope = slope;
        }
    }
}

TEST_CASE("polygonal profiles are validated") {
    CHECK_THROWS_AS(SymmetricConvexDomain::polygonal({{0, 1}, {0.5, 1.2}, {1, 0}}), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::polygonal({{0, 1}, {0.3, 0.2}, {1, 0.1}}), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::polygonal({{0.1, 1}, {1, 0}}), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::polygonal({{0, 1}, {0, 0.5}}), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::superellipse(1, 1, 0.5), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::rectangle(0, 1), Error);
    CHECK(SymmetricConvexDomain::polygonal({{0, 1}, {1, 1}}).is_rectangle());
}

TEST_CASE("json round trip") {
    for (const auto& d : zoo()) {
        const auto back = SymmetricConvexDomain::from_json(d.to_json());
        CHECK(back.to_json() == d.to_json());
    }
    CHECK_THROWS_AS(SymmetricConvexDomain::from_json(nlohmann::json{{"kind", "blob"}, {"a", 1}, {"b", 1}}), Error);
    CHECK_THROWS_AS(SymmetricConvexDomain::from_json(nlohmann::json{{"kind", "rectangle"}}), Error);
}
