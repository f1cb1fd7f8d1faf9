#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gapkit/certify.hpp"
#include "gapkit/spectral.hpp"
#include "gapkit/walk.hpp"
#include "oracles.hpp"

using namespace gapkit;
using namespace gapkit::walk;
using Catch::Approx;

namespace {

const auto square = SymmetricConvexDomain::rectangle(1, 1);

std::vector<int> constant(int value, int m) { return std::vector<int>(m + 1, value); }

}  // namespace

TEST_CASE("time and space scaling") {
    for (int n = 1; n <= 10; ++n) {
        const ScaledWalkParams p(n);
        // per-step variance 2/3, so theta_n steps of size 2^-n have unit variance
        CHECK(static_cast<double>(p.theta()) * p.spacing() * p.spacing() * (2.0 / 3.0) == Approx(1.0).epsilon(1e-15));
        CHECK(p.steps_for(1.0) == p.theta());
        CHECK(p.time_of(p.theta()) == 1.0);
    }
    const ScaledWalkParams p(1);
    CHECK(p.theta() == 6);
    CHECK_THROWS_AS(p.steps_for(0.1), Error);
    CHECK_THROWS_AS(p.lattice(0.3), Error);
    CHECK_THROWS_AS(ScaledWalkParams(0), Error);
    CHECK_THROWS_AS(ScaledWalkParams(15), Error);
}

TEST_CASE("snapping to the lattice") {
    std::vector<std::string> w;
    CHECK(snap_to_lattice(0.3, 2, &w, "v0") == 0.25);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("v0") != std::string::npos);
    CHECK(snap_to_lattice(0.75, 2, &w) == 0.75);
    CHECK(w.size() == 1);
}

TEST_CASE("step frequencies are close to one third") {
    const CounterRng rng(3, 0);
    const int N = 300000;
    int cx[3] = {0, 0, 0}, cy[3] = {0, 0, 0}, joint = 0;
    for (int k = 0; k < N; ++k) {
        const Step s = draw_step(rng, k);
        ++cx[s.dx + 1], ++cy[s.dy + 1];
        joint += s.dx == 1 && s.dy == -1;
    }
    const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / N);
    for (int q = 0; q < 3; ++q) {
        CHECK(std::abs(cx[q] / double(N) - 1.0 / 3) < 5 * se);
        CHECK(std::abs(cy[q] / double(N) - 1.0 / 3) < 5 * se);
    }
    // independent coordinates
    CHECK(std::abs(joint / double(N) - 1.0 / 9) < 5 * std::sqrt((1.0 / 9) * (8.0 / 9) / N));
}

TEST_CASE("exit simulation") {
    const ScaledWalkParams p(2);
    const auto plane = simulate_exit(LatticeRegion::whole_plane(), {0, 0}, p, 2.0, 1);
    CHECK(plane.censored);
    CHECK(plane.steps == p.steps_for(2.0));
    // single interior column: any horizontal move exits on step one
    const LatticeRegion one = LatticeRegion::strip(-1, 1);
    int first = 0;
    const int R = 30000;
    for (int r = 0; r < R; ++r) first += simulate_exit(one, {0, 0}, p, 1.0, 5, r).steps == 1;
    CHECK(std::abs(first / double(R) - 2.0 / 3) < 5 * std::sqrt(2.0 / 9 / R));
    CHECK_THROWS_AS(simulate_exit(one, {0.5, 0}, p, 1.0, 5), Error);
    CHECK_THROWS_AS(simulate_exit(one, {0.1, 0}, p, 1.0, 5), Error);
}

TEST_CASE("Monte Carlo survival against exact rectangle survival") {
    const ScaledWalkParams p(1);
    const LatticeRegion rect = LatticeRegion::rectangle(0, 4, 0, 5);
    for (double t : {0.5, 1.0, 2.0}) {
        const int m = static_cast<int>(p.steps_for(t));
        const double exact = rectangle_survival_2d(4, 5, 2, 2, m).convert_to<double>();
        const auto est = survival_mc(rect, {1.0, 1.0}, p, t, 100000, 17);
        CHECK(std::abs(est.estimate - exact) < 5 * std::sqrt(exact * (1 - exact) / 1e5));
        CHECK(est.ci.lo <= est.estimate);
        CHECK(est.estimate <= est.ci.hi);
    }
    const auto zero = survival_mc(rect, {1.0, 1.0}, p, 0.0, 1000, 1);
    CHECK(zero.estimate == 1.0);
    CHECK(zero.survivors == 1000);
    CHECK_THROWS_AS(survival_mc(rect, {1.0, 1.0}, p, 1.0, 999, 1), Error);
}

TEST_CASE("survival is reproducible for a fixed seed") {
    const ScaledWalkParams p(3);
    const auto D = LatticeRegion::domain(square, std::nullopt, p);
    const auto a = survival_mc(D, {0, 0}, p, 0.5, 20000, 9), b = survival_mc(D, {0, 0}, p, 0.5, 20000, 9);
    CHECK(a.survivors == b.survivors);
}

TEST_CASE("rectangle survival factorises into one-dimensional factors") {
    for (int m : {0, 1, 4, 9}) {
        const Rational two = rectangle_survival_2d(5, 4, 2, 1, m);
        const Rational x = exact_survival_dp(constant(5, m), BoundaryMode::one_sided, 2);
        const Rational y = exact_survival_dp(constant(4, m), BoundaryMode::one_sided, 1);
        CHECK(two == x * y);
    }
}

TEST_CASE("exact DP against enumeration and the sine transform") {
    const std::vector<int> f = {3, 4, 2, 3, 5, 3, 4};
    for (int i0 = 1; i0 < 3; ++i0) {
        CHECK(exact_survival_dp(f, BoundaryMode::one_sided, i0) ==
              oracle::enumerate_survival(std::vector<int>(f.size(), 0), f, i0));
        std::vector<int> lower(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) lower[k] = -f[k];
        CHECK(exact_survival_dp(f, BoundaryMode::two_sided, i0) == oracle::enumerate_survival(lower, f, i0));
        CHECK(exact_survival_dp(f, BoundaryMode::two_sided, -i0) == exact_survival_dp(f, BoundaryMode::two_sided, i0));
    }
    for (int m : {1, 5, 30})
        for (int i0 : {1, 3, 6})
            CHECK(exact_survival_dp<double>(constant(8, m), BoundaryMode::one_sided, i0) ==
                  Approx(oracle::discrete_interval_survival(8, i0, m)).epsilon(1e-12));
}

TEST_CASE("small profiles by hand") {
    CHECK(exact_survival_dp(constant(2, 1), BoundaryMode::one_sided, 1) == Rational(1, 3));
    CHECK(exact_survival_dp(constant(2, 2), BoundaryMode::one_sided, 1) == Rational(1, 9));
    CHECK(exact_survival_dp(constant(2, 1), BoundaryMode::two_sided, 1) == Rational(2, 3));
    CHECK(exact_survival_dp(constant(2, 0), BoundaryMode::two_sided, 1) == 1);
    CHECK_THROWS_AS(exact_survival_dp(std::vector<int>{2, 1}, BoundaryMode::one_sided, 1), Error);
    CHECK_THROWS_AS(exact_survival_dp(constant(3, 2), BoundaryMode::one_sided, 0), Error);
    CHECK_THROWS_AS(exact_survival_dp(constant(3, 2), BoundaryMode::two_sided, 3), Error);
}

TEST_CASE("surviving mass is nonincreasing") {
    const std::vector<int> f = {4, 6, 3, 5, 5, 2, 6, 6, 4};
    for (auto mode : {BoundaryMode::one_sided, BoundaryMode::two_sided}) {
        const auto curve = exact_survival_curve(f, mode, 1);
        for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] <= curve[k - 1]);
    }
}

TEST_CASE("ratio monotonicity for profile pairs") {
    const auto same = lemma7_check(constant(3, 5), constant(3, 5), 1);
    CHECK(same.ratio_f == same.ratio_g);
    CHECK(same.holds);

    const auto r = lemma7_check(constant(2, 4), constant(3, 4), 1);
    CHECK(r.holds);
    CHECK(r.ratio_f < r.ratio_g);
    // direct enumeration of the same four probabilities
    const std::vector<int> z(5, 0), two(5, 2), m2(5, -2), three(5, 3), m3(5, -3);
    CHECK(r.ratio_f == oracle::enumerate_survival(z, two, 1) / oracle::enumerate_survival(m2, two, 1));
    CHECK(r.ratio_g == oracle::enumerate_survival(z, three, 1) / oracle::enumerate_survival(m3, three, 1));
    CHECK(r.ratio_f == Rational(1, 29));
    CHECK(r.ratio_g == Rational(4, 15));

    int violations = 0;
    const CounterRng rng(21, 0);
    for (int inst = 0; inst < 200; ++inst) {
        const auto [f, g] = random_profile_pair(9, 6, CounterRng(21, inst));
        const int i0 = 1 + static_cast<int>(rng.uniform(inst) * (*std::min_element(f.begin(), f.end()) - 1));
        violations += !lemma7_check(f, g, i0).holds;
    }
    CHECK(violations == 0);

    CHECK_THROWS_AS(lemma7_check(constant(3, 4), constant(2, 4), 1), Error);
    CHECK_THROWS_AS(lemma7_check(constant(3, 4), constant(3, 3), 1), Error);
    // the walk cannot stay inside 0 < R < f when f drops to 1 above 0: rejected by the profile check
    CHECK_THROWS_AS(lemma7_check({3, 1, 3}, {3, 3, 3}, 1), Error);
}

TEST_CASE("random profile pairs are ordered and bounded") {
    for (int inst = 0; inst < 100; ++inst) {
        const auto [f, g] = random_profile_pair(12, 6, CounterRng(4, inst));
        REQUIRE(f.size() == 13);
        for (std::size_t k = 0; k < f.size(); ++k) {
            CHECK(f[k] >= 2);
            CHECK(f[k] <= g[k]);
            CHECK(g[k] <= 6);
        }
    }
}

TEST_CASE("pinched ratio contraction") {
    const ScaledWalkParams p(3);
    const double d = certify::d_of(0.5);
    const auto none = lemma9_style_check(0.5, {}, 10, 0.5, p, d, 3);
    CHECK(none.hypothesis_met);
    CHECK(none.pinched_ratio == none.full_ratio);
    CHECK(none.holds);

    const auto one = lemma9_style_check(0.5, {5}, 10, 0.5, p, d, 3);
    CHECK(one.hypothesis_met);
    CHECK(one.holds);
    CHECK(one.pinch_monotone);
    CHECK(one.pinched_ratio < one.full_ratio);
    CHECK(one.pinched_one_sided <= one.full_one_sided);

    const auto two = lemma9_style_check(0.5, {4, 7}, 11, 0.5, p, d, 3);
    CHECK(two.holds);

    const auto early = lemma9_style_check(0.5, {1}, 10, 0.5, p, d, 3);
    CHECK_FALSE(early.hypothesis_met);
    CHECK(early.message.find("hypothesis unmet") != std::string::npos);
    const auto late = lemma9_style_check(0.5, {8}, 10, 0.5, p, d, 3);
    CHECK_FALSE(late.hypothesis_met);
    CHECK_THROWS_AS(lemma9_style_check(0.3, {5}, 10, 0.5, p, d, 3), Error);
}

TEST_CASE("level crossings") {
    const std::vector<int> flat(21, 4);
    CHECK(crossing_count(flat, 4, 2).count() == 11);
    CHECK(crossing_count(flat, 4, 1).count() == 21);
    CHECK(crossing_count(flat, 5, 1).count() == 0);
    const auto s = crossing_count({0, 1, 0, 1, 0, 1, 0}, 0, 3);
    CHECK(s.times == std::vector<std::int64_t>{0, 4});
    CHECK_THROWS_AS(crossing_count(flat, 4, 0), Error);

    const ScaledWalkParams p(2);
    std::vector<std::string> w;
    const auto y = sample_path_y(2, 400, 3);
    const auto snapped = crossing_count(y, 0.55, 0.5, p, &w);
    CHECK(w.size() == 1);
    CHECK(snapped.level == 2);
    CHECK(snapped.separation == p.steps_for(0.5));
    for (std::size_t k = 1; k < snapped.times.size(); ++k)
        CHECK(snapped.times[k] - snapped.times[k - 1] >= snapped.separation);
    for (std::size_t k = 1; k < y.size(); ++k) CHECK(std::abs(y[k] - y[k - 1]) <= 1);
}

TEST_CASE("double ratio is one when both domains coincide") {
    const ScaledWalkParams p(2);
    for (auto est : {RatioEstimator::direct, RatioEstimator::population}) {
        const auto tab = ratio_experiment(square, square, {0.25, 0}, p, {0.5, 1.0}, 20000, 3, est);
        for (const auto& row : tab.rows) {
            REQUIRE_FALSE(row.censored);
            CHECK(row.double_ratio == Approx(1.0).margin(1e-12));
            CHECK(row.survival[1] <= row.survival[0]);
        }
    }
    CHECK_THROWS_AS(ratio_experiment(square, square, {-0.25, 0}, p, {1.0}, 20000, 3), Error);
    CHECK_THROWS_AS(ratio_experiment(square, square, {0.25, 0}, p, {}, 20000, 3), Error);
}

TEST_CASE("population and direct estimators agree where both resolve") {
    const ScaledWalkParams p(2);
    const auto dia = SymmetricConvexDomain::diamond(1, 1);
    const auto a = ratio_experiment(dia, square, {0.25, 0}, p, {0.5}, 200000, 5, RatioEstimator::direct);
    const auto b = ratio_experiment(dia, square, {0.25, 0}, p, {0.5}, 200000, 5, RatioEstimator::population);
    const auto& ra = a.rows[0];
    const auto& rb = b.rows[0];
    CHECK(std::abs(ra.log_double_ratio - rb.log_double_ratio) < 2 * (ra.log_se + rb.log_se));
}

TEST_CASE("mean exit time of the walk against the grid Poisson solve") {
    const ScaledWalkParams p(3);
    const auto D = LatticeRegion::domain(square, std::nullopt, p);
    const int R = 20000;
    double sum = 0.0;
    for (int r = 0; r < R; ++r) {
        const auto e = simulate_exit(D, {0, 0}, p, 20.0, 2, r);
        REQUIRE_FALSE(e.censored);
        sum += e.time;
    }
    // Brownian time runs twice as fast as heat time
    const double grid = 2 * spectral::mean_exit_grid(spectral::discretize(spectral::Region::full(square), 1.0 / 8), {0, 0});
    CHECK(sum / R == Approx(grid).epsilon(0.03));
}
