// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and budgets
// are fixed here; exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gapkit/certify.hpp"
#include "gapkit/cli.hpp"
#include "gapkit/conditioned.hpp"
#include "gapkit/interval.hpp"
#include "gapkit/spectral.hpp"
#include "gapkit/walk.hpp"

using namespace gapkit;
namespace sp = gapkit::spectral;

namespace {

constexpr double PI = std::numbers::pi;

// pinned tolerances and budgets
constexpr double rel_tol_spectrum = 5e-3;
constexpr double spectrum_seconds = 60;
constexpr double gap_seconds = 300;
constexpr double dp_seconds = 60;
constexpr double certify_seconds = 120;
constexpr double stationarity_tol = 1e-8;
constexpr double quadrature_tol = 1e-10;
constexpr double slit_ratio = 0.5;

const auto square = SymmetricConvexDomain::rectangle(1, 1);
const auto diamond = SymmetricConvexDomain::diamond(1, 1);
const auto disc = SymmetricConvexDomain::ellipse(1, 1);
const auto hexagon = SymmetricConvexDomain::polygonal({{0, 1}, {0.1, 1}, {1, 0.1}});
const auto rect06 = SymmetricConvexDomain::rectangle(0.6, 1);
const auto rect08 = SymmetricConvexDomain::rectangle(0.8, 1);

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. rectangle spectrum
Verdict rectangle_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = sp::spectrum(sp::Region::full(square), 1.0 / 32);
    const double s = seconds_since(t0);
    const double e1 = std::abs(r.lambda1 / (PI * PI / 2) - 1), e2 = std::abs(r.lambda2 / (5 * PI * PI / 4) - 1),
                 eg = std::abs(r.gap / (3 * PI * PI / 4) - 1);
    return {e1 < rel_tol_spectrum && e2 < rel_tol_spectrum && eg < rel_tol_spectrum && s < spectrum_seconds,
            fmt("rel err l1 %.2e l2 %.2e gap %.2e, %.1f s", e1, e2, eg, s)};
}

// 2. strict gap inequality, equality for rectangles
Verdict gap_inequality() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string d;
    for (const auto& [name, dom] : {std::pair{"diamond", diamond}, {"disc", disc}, {"hexagon", hexagon}}) {
        const auto g = sp::gap_report(dom, 1.0 / 32);
        ok = ok && g.margin > 2 * g.err_est;
        d += fmt("%s %.4g/%.1e ", name, g.margin, g.err_est);
    }
    for (const auto& [name, dom] : {std::pair{"c0.6", rect06}, {"c0.8", rect08}}) {
        const auto g = sp::gap_report(dom, 1.0 / 40);
        ok = ok && std::abs(g.margin) <= 2 * g.err_est;
        d += fmt("%s %.1e/%.1e ", name, g.margin, g.err_est);
    }
    const double s = seconds_since(t0);
    return {ok && s < gap_seconds, d + fmt("(margin/err), %.1f s", s)};
}

// 3. second eigenvalue equals the smaller half-domain ground eigenvalue
Verdict payne() {
    const std::vector<std::tuple<const char*, SymmetricConvexDomain, double>> doms = {
        {"square", square, 1.0 / 32},
        {"diamond", diamond, 1.0 / 32},
        {"disc", disc, 1.0 / 32},
        {"hexagon", hexagon, 1.0 / 32},
        {"stadium", SymmetricConvexDomain::stadium(1, 0.6), 1.0 / 40},
        {"superellipse", SymmetricConvexDomain::superellipse(1, 1, 4), 1.0 / 32},
        {"c0.6", rect06, 1.0 / 40},
        {"c0.8", rect08, 1.0 / 40}};
    bool ok = true;
    double worst = 0.0;
    std::string bad;
    for (const auto& [name, dom, h] : doms) {
        const auto p = sp::payne_check(dom, h);
        ok = ok && p.within_error;
        worst = std::max(worst, p.residual / p.err_est);
        if (!p.within_error) bad += std::string(" ") + name;
    }
    return {ok, fmt("%zu domains, worst residual/err %.1e", doms.size(), worst) + (bad.empty() ? "" : ", out:" + bad)};
}

// 4. slit square
Verdict slit() {
    const double h = 1.0 / 40, sq = sp::rectangle_gap(1, 1);
    std::vector<sp::SpectrumResult> r;
    for (double eps : {0.8, 0.4, 0.2, 0.1}) r.push_back(sp::slit_square_gap(eps, h));
    bool dec = true;
    for (std::size_t i = 1; i < r.size(); ++i) dec = dec && r[i - 1].gap - r[i].gap > r[i - 1].err_est + r[i].err_est;
    const double ratio = r.back().gap / sq;
    return {dec && ratio < slit_ratio,
            fmt("gaps %.3f %.3f %.3f %.3f, H_0.1/square %.3f", r[0].gap, r[1].gap, r[2].gap, r[3].gap, ratio)};
}

nlohmann::json run_cli(const std::vector<std::string>& args, int& code) {
    const auto o = cli::execute(args);
    code = o.exit_code;
    return o.record.to_json();
}

// 5. ratio monotonicity on random profile pairs, exact
Verdict ratio_monotonicity() {
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    const auto rec = run_cli({"lemma-check", "--which", "7", "--random", "1000", "--m", "12", "--max-height", "6",
                              "--seed", "1"},
                             code);
    const double s = seconds_since(t0);
    const auto n = rec["payload"]["instances"].get<int>(), v = rec["payload"]["violations"].get<int>();
    return {code == 0 && n == 1000 && v == 0 && s < dp_seconds, fmt("%d instances, %d violations, %.1f s", n, v, s)};
}

// 6. product identity, exact
Verdict product() {
    int code = 0;
    const auto rec = run_cli({"lemma-check", "--which", "product", "--random", "100", "--m", "12", "--max-height",
                              "6", "--seed", "1"},
                             code);
    const auto n = rec["payload"]["instances"].get<int>(), v = rec["payload"]["mismatches"].get<int>();
    return {code == 0 && n == 100 && v == 0, fmt("%d instances, %d mismatches", n, v)};
}

// 7. walk survival against the continuum product
Verdict walk_limit() {
    const double closed = std::pow(interval::survival_1d(interval::IntervalKind::sym, 0.0, 0.5).value, 2);
    const std::uint64_t reps = 100000;
    auto est = [&](int n, std::uint64_t seed) {
        const walk::ScaledWalkParams p(n);
        return walk::survival_mc(walk::LatticeRegion::domain(square, std::nullopt, p), {0, 0}, p, 1.0, reps, seed);
    };
    bool ci_ok = true;
    std::string d = fmt("closed %.5f;", closed);
    for (int n : {4, 5, 6}) {
        const auto e = est(n, 1);
        const bool in = e.ci.contains(closed);
        ci_ok = ci_ok && in;
        // exact lattice value: independent coordinates on (0, 2N) from N
        const walk::ScaledWalkParams p(n);
        const int N = static_cast<int>(p.cells_per_unit());
        const double lat = std::pow(
            walk::exact_survival_dp<double>(std::vector<int>(p.theta() + 1, 2 * N), walk::BoundaryMode::one_sided, N),
            2);
        d += fmt(" n%d %.5f [%.5f, %.5f] lattice %.5f%s", n, e.estimate, e.ci.lo, e.ci.hi, lat,
                 in ? "" : " (CI misses)");
    }
    int closer = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        closer += std::abs(est(6, seed).estimate - closed) < std::abs(est(4, seed).estimate - closed);
    d += fmt("; n6 closer in %d/10 seeds", closer);
    return {ci_ok && closer >= 5, d};
}

// 8. half-domain double ratio for the diamond inside the square
Verdict double_ratio() {
    const walk::ScaledWalkParams p(3);
    const auto tab = walk::ratio_experiment(diamond, square, {0.25, 0}, p, {1, 2, 4}, 1000000, 7,
                                            walk::RatioEstimator::population, 10);
    bool dec = true, censored = false;
    std::vector<double> ts, logs;
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        censored = censored || tab.rows[i].censored;
        ts.push_back(tab.rows[i].t), logs.push_back(tab.rows[i].log_double_ratio);
        if (i > 0) dec = dec && logs[i] < logs[i - 1];
    }
    sp::SpectrumOptions one;
    one.k = 1;
    one.check_mesh = false;
    auto l1 = [&](const SymmetricConvexDomain& dom, std::optional<Half> half) {
        return sp::spectrum(half ? sp::Region::half(dom, *half) : sp::Region::full(dom), 1.0 / 32, one).lambda1;
    };
    const double diff = (l1(diamond, Half::right) - l1(diamond, std::nullopt)) -
                        (l1(square, Half::right) - l1(square, std::nullopt));
    const double slope = ls_slope(ts, logs);
    return {!censored && dec && diff > 0 && slope < 0,
            fmt("log r %.3f %.3f %.3f, slope %.3f, predicted %.3f (eigen diff %.3f)", logs[0], logs[1], logs[2],
                slope, -0.5 * diff, diff)};
}

// 9. interval ultracontractivity sandwich
Verdict interval_uc() {
    using interval::IntervalKind;
    bool holds = true, shrink = true;
    double slack = INFINITY;
    for (auto kind : {IntervalKind::unit, IntervalKind::sym}) {
        double prev_up = INFINITY, prev_lo = INFINITY;
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            const auto b = interval::uc_bounds(kind, t);
            for (int i = 1; i <= 20; ++i)
                for (int j = 1; j <= 20; ++j) {
                    const double x = interval::left_end(kind) + interval::length(kind) * i / 21.0;
                    const double y = interval::left_end(kind) + interval::length(kind) * j / 21.0;
                    const double r = interval::normalized_kernel_ratio(kind, t, x, y);
                    holds = holds && b.lower <= r && r <= b.upper;
                    slack = std::min({slack, r - b.lower, b.upper - r});
                }
            // C - 1 is the series S(t); 1 - c = min(1, S(t))
            shrink = shrink && b.series < prev_up && 1 - b.lower <= prev_lo;
            prev_up = b.series, prev_lo = 1 - b.lower;
        }
    }
    return {holds && shrink, fmt("2 intervals x 4 times x 400 points, min slack %.2e, shrinking %s", slack,
                                 shrink ? "yes" : "no")};
}

// 10. conditioned chain
Verdict conditioned_chain() {
    const conditioned::ConditionedChain c(square, Half::right, 1.0 / 16);
    const double drift = (c.psi().transpose() * c.step() - c.psi().transpose()).cwiseAbs().maxCoeff();
    const auto est = conditioned::estimate_C0(c, 0.5, 100000, 1);
    std::vector<double> p;
    for (int m : {20, 80, 320}) p.push_back(conditioned::ergodic_fraction(c, 0.5, m, 2000, 1, est.estimate).p_above_08);
    const bool inc = p[0] < p[1] && p[1] < p[2];
    return {drift < stationarity_tol && inc,
            fmt("stationarity %.1e, C0 %.4f, P(frac > 0.8 C0) %.3f %.3f %.3f", drift, est.estimate, p[0], p[1], p[2])};
}

// 11. explicit certificate
Verdict certificate() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = certify::certificate(0.5, 0.625, 4);
    const conditioned::ConditionedChain chain(square, Half::right, 1.0 / 16);
    const auto est = conditioned::estimate_C0(chain, 0.625, 100000, 1);
    const bool c0_ok = c.primary.C0_lower.log <= std::log(est.estimate);
    bool beta_ok = true;
    double prev = -INFINITY;
    for (int i = 1; i <= 9; ++i) {
        const auto b = certify::beta_rect(i / 10.0);
        beta_ok = beta_ok && b.positive() && b.log > prev && b.value() <= 1 / (2 * PI);
        prev = b.log;
    }
    const bool omits = certify::certificate_applies(hexagon, c.u0, c.v0);
    const auto g = sp::gap_report(hexagon, 1.0 / 32);
    const bool margin_ok = g.margin - 2 * g.err_est > 0 && c.g_value.log <= std::log(g.margin - 2 * g.err_est);
    const double s = seconds_since(t0);
    return {c.ledger_positive && c.g_value.positive() && c0_ok && beta_ok && omits && margin_ok && s < certify_seconds,
            fmt("log g %.4e, ledger %s, C0 lower exp(%.3e) vs %.4f, beta_rect %s, hexagon margin %.3f, %.1f s",
                c.g_value.log, c.ledger_positive ? "positive" : "incomplete", c.primary.C0_lower.log, est.estimate,
                beta_ok ? "ok" : "bad", g.margin, s)};
}

// 12. closed forms against quadrature
double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
    return s * h / 3;
}

Verdict beta_gamma() {
    double worst = 0.0;
    bool ordered = true;
    for (int i = 1; i <= 99; ++i) {
        const double a = i / 100.0;
        const double qb = simpson([](double x) { return 2 * std::pow(std::sin(PI * x), 2); }, 0, a);
        const double qg = simpson([](double x) { return std::pow(std::cos(PI * x / 2), 2); }, -a, a);
        worst = std::max({worst, std::abs(interval::beta(a) - qb), std::abs(interval::gamma(a) - qg)});
        ordered = ordered && interval::beta(a) < interval::gamma(a);
    }
    return {worst < quadrature_tol && ordered, fmt("99 points, max |closed - quadrature| %.1e", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Verdict (*)()>> criteria = {
        {"rectangle spectrum", rectangle_spectrum},
        {"strict gap inequality", gap_inequality},
        {"nodal line on a half domain", payne},
        {"slit square", slit},
        {"ratio monotonicity (exact DP)", ratio_monotonicity},
        {"product identity (exact)", product},
        {"walk to continuum", walk_limit},
        {"half-domain double ratio", double_ratio},
        {"interval ultracontractivity", interval_uc},
        {"conditioned chain", conditioned_chain},
        {"explicit certificate", certificate},
        {"beta and gamma closed forms", beta_gamma},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%-4s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
