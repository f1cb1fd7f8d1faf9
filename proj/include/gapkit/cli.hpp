#pragma once

// Command-line front end. execute() parses one command line into a result
// record plus derived CSV/SVG text; run() adds printing, file output and the
// exit-code mapping. Both are usable in-process.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapkit/certify.hpp"
#include "gapkit/conditioned.hpp"
#include "gapkit/error.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/interval.hpp"
#include "gapkit/report.hpp"
#include "gapkit/spectral.hpp"
#include "gapkit/walk.hpp"

namespace gapkit::cli {

using nlohmann::json;
using report::Anchor;

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_inconclusive = 2;

struct Outcome {
    int exit_code = exit_ok;
    report::ResultRecord record;
    std::string csv;  // empty when the experiment is not tabular
    std::string svg;  // set only with --plot
};

// ---------------------------------------------------------------------------
// Parsing helpers.

/// Decimal or rational literal such as "0.25" or "1/32".
inline double parse_number(const std::string& s) {
    auto one = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (...) {
            fail(ErrorKind::invalid_argument, "not a number: '" + s + "'");
        }
        require(used == t.size(), ErrorKind::invalid_argument, "not a number: '" + s + "'");
        return v;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return one(s);
    const double den = one(s.substr(slash + 1));
    require(den != 0.0, ErrorKind::invalid_argument, "zero denominator in '" + s + "'");
    return one(s.substr(0, slash)) / den;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_number(item));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_list(s)) {
        require(v == std::floor(v), ErrorKind::invalid_argument, "expected integers in '" + s + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

inline Point parse_point(const std::string& s) {
    const auto v = parse_list(s);
    require(v.size() == 2, ErrorKind::invalid_argument, "expected a point 'x,y', got '" + s + "'");
    return {v[0], v[1]};
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    require(bool(f), ErrorKind::io, "cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::invalid_argument, "malformed JSON in " + path + ": " + e.what());
    }
}

inline SymmetricConvexDomain load_domain(const std::string& path) {
    return SymmetricConvexDomain::from_json(read_json_file(path));
}

inline std::optional<Half> parse_half(const std::string& s) {
    if (s == "full") return std::nullopt;
    if (s == "right") return Half::right;
    if (s == "top") return Half::top;
    fail(ErrorKind::invalid_argument, "half must be full, right or top, got '" + s + "'");
}

/// Options of the selected subcommand as given (or defaulted), for echoing.
inline json echo_options(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* o : sub.get_options()) {
        const std::string name = o->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h" || name == "--help-all") continue;
        std::string key = o->get_lnames().empty() ? name : o->get_lnames().front();
        if (o->get_type_size() == 0) {
            j[key] = o->count() > 0;
        } else if (o->count() > 0) {
            const auto& r = o->results();
            j[key] = r.size() == 1 ? json(r.front()) : json(r);
        } else {
            j[key] = o->get_default_str();
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each receives the parsed option map.

struct Args {
    std::map<std::string, std::string> s;
    bool plot = false;

    const std::string& str(const std::string& k) const {
        auto it = s.find(k);
        require(it != s.end(), ErrorKind::invalid_argument, "missing option --" + k);
        return it->second;
    }
    bool has(const std::string& k) const { return s.count(k) && !s.at(k).empty(); }
    double num(const std::string& k) const { return parse_number(str(k)); }
    std::uint64_t count(const std::string& k) const {
        const double v = num(k);
        require(v >= 0 && v == std::floor(v), ErrorKind::invalid_argument, "--" + k + " must be a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    }
    int integer(const std::string& k) const {
        const double v = num(k);
        require(v == std::floor(v), ErrorKind::invalid_argument, "--" + k + " must be an integer");
        return static_cast<int>(v);
    }
};

inline json spectrum_json(const spectral::SpectrumResult& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"h", l.h}, {"nodes", l.nodes}, {"lambda1", l.lambda1}, {"lambda2", l.lambda2}});
    auto fit = [](const spectral::Extrapolation& e) {
        return json{{"value", e.value},
                    {"err_est", e.err_est},
                    {"extrapolated", e.extrapolated},
                    {"observed_order", e.observed_order ? json(*e.observed_order) : json(nullptr)}};
    };
    return {{"lambda1", r.lambda1},    {"lambda2", r.lambda2},           {"gap", r.gap},
            {"err_est", r.err_est},    {"lambda1_fit", fit(r.lambda1_fit)}, {"lambda2_fit", fit(r.lambda2_fit)},
            {"levels", levels}};
}

inline std::string levels_csv(const spectral::SpectrumResult& r) {
    report::Csv csv({"h", "nodes", "lambda1", "lambda2"});
    for (const auto& l : r.levels)
        csv.row({report::num(l.h), std::to_string(l.nodes), report::num(l.lambda1), report::num(l.lambda2)});
    return csv.str();
}

inline std::string phi_heatmap(const spectral::SpectrumResult& r, const std::string& title) {
    std::vector<double> xs, ys, vs;
    for (int i = 0; i < r.grid->size(); ++i) {
        const Point p = r.grid->point(i);
        xs.push_back(p.x), ys.push_back(p.y), vs.push_back(r.phi1(i));
    }
    return report::svg_heatmap(xs, ys, vs, r.grid->h(), title);
}

inline Outcome cmd_spectrum(const Args& a, Outcome o) {
    const auto domain = load_domain(a.str("domain"));
    const auto half = parse_half(a.str("half"));
    o.record.config["domain_spec"] = domain.to_json();
    spectral::SpectrumOptions opt;
    opt.k = half ? 1 : 2;
    const auto region = half ? spectral::Region::half(domain, *half) : spectral::Region::full(domain);
    if (half) spectral::check_mesh_width(spectral::Region::full(domain), a.num("h")), opt.check_mesh = false;
    const auto r = spectral::spectrum(region, a.num("h"), opt);
    o.record.anchor = Anchor::dirichlet_spectrum;
    o.record.payload = spectrum_json(r);
    if (domain.is_rectangle() && !half) {
        o.record.payload["closed_form"] = {
            {"lambda1", spectral::rectangle_eigenvalue(domain.a(), domain.b(), 1, 1)},
            {"gap", spectral::rectangle_gap(domain.a(), domain.b())}};
    }
    o.csv = levels_csv(r);
    if (a.plot) o.svg = phi_heatmap(r, "ground state, " + std::string(to_string(domain.kind())));
    return o;
}

inline Outcome cmd_gap_compare(const Args& a, Outcome o) {
    const auto domain = load_domain(a.str("domain"));
    o.record.config["domain_spec"] = domain.to_json();
    const auto g = spectral::gap_report(domain, a.num("h"));
    o.record.anchor = Anchor::gap_inequality;
    o.record.status = spectral::to_string(g.status);
    o.record.payload = {{"domain_gap", g.domain_gap},
                        {"rectangle_gap", g.rectangle_gap},
                        {"margin", g.margin},
                        {"err_est", g.err_est},
                        {"status", spectral::to_string(g.status)},
                        {"spectrum", spectrum_json(g.spectrum)}};
    o.csv = levels_csv(g.spectrum);
    if (a.plot) o.svg = phi_heatmap(g.spectrum, "ground state");
    switch (g.status) {
        case spectral::GapStatus::strict:
        case spectral::GapStatus::rectangle_equality: o.exit_code = exit_ok; break;
        case spectral::GapStatus::inconclusive: o.exit_code = exit_inconclusive; break;
        case spectral::GapStatus::violated: o.exit_code = exit_error; break;
    }
    return o;
}

inline Outcome cmd_payne(const Args& a, Outcome o) {
    const auto domain = load_domain(a.str("domain"));
    o.record.config["domain_spec"] = domain.to_json();
    const auto p = spectral::payne_check(domain, a.num("h"));
    o.record.anchor = Anchor::nodal_line_halves;
    o.record.status = p.within_error ? "within-error" : "unresolved";
    o.record.payload = {{"lambda2", p.lambda2},         {"lambda1_right", p.lambda1_right},
                        {"lambda1_top", p.lambda1_top}, {"residual", p.residual},
                        {"err_est", p.err_est},         {"within_error", p.within_error}};
    o.exit_code = p.within_error ? exit_ok : exit_inconclusive;
    return o;
}

inline Outcome cmd_slit(const Args& a, Outcome o) {
    const auto eps = parse_list(a.str("eps"));
    require(!eps.empty(), ErrorKind::invalid_argument, "slit-demo: empty --eps list");
    const double h = a.num("h");
    o.record.anchor = Anchor::slit_counterexample;
    const double square_gap = spectral::rectangle_gap(1.0, 1.0);
    json rows = json::array();
    report::Csv csv({"eps", "gap", "err_est", "ratio_to_square"});
    std::vector<double> gaps, errs;
    for (double e : eps) {
        const auto r = spectral::slit_square_gap(e, h);
        gaps.push_back(r.gap), errs.push_back(r.err_est);
        rows.push_back({{"eps", e}, {"gap", r.gap}, {"err_est", r.err_est}, {"ratio_to_square", r.gap / square_gap}});
        csv.row({report::num(e), report::num(r.gap), report::num(r.err_est), report::num(r.gap / square_gap)});
    }
    // Ordered by eps descending, the gaps must fall strictly beyond their errors.
    std::vector<std::size_t> order(eps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return eps[x] > eps[y]; });
    bool decreasing = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto p = order[i - 1], q = order[i];
        if (!(gaps[p] - gaps[q] > errs[p] + errs[q])) decreasing = false;
    }
    o.record.payload = {{"square_gap", square_gap}, {"rows", rows}, {"strictly_decreasing", decreasing}};
    o.record.status = decreasing ? "decreasing" : "unresolved";
    o.exit_code = decreasing ? exit_ok : exit_inconclusive;
    o.csv = csv.str();
    if (a.plot) {
        std::vector<double> xs, ys;
        for (auto i : order) xs.push_back(eps[i]), ys.push_back(gaps[i]);
        o.svg = report::svg_curve(xs, ys, "slit square gap", "eps", "gap");
    }
    return o;
}

inline Outcome cmd_walk_ratio(const Args& a, Outcome o) {
    const auto D = load_domain(a.str("domain"));
    const auto G = a.has("gamma") ? load_domain(a.str("gamma")) : SymmetricConvexDomain::rectangle(1.0, 1.0);
    o.record.config["domain_spec"] = D.to_json();
    o.record.config["gamma_spec"] = G.to_json();
    const walk::ScaledWalkParams p(a.integer("n"));
    Point z0 = parse_point(a.str("z0"));
    z0 = {walk::snap_to_lattice(z0.x, p.n, &o.record.warnings, "z0.x"),
          walk::snap_to_lattice(z0.y, p.n, &o.record.warnings, "z0.y")};
    const auto est = a.str("estimator");
    require(est == "direct" || est == "population", ErrorKind::invalid_argument,
            "walk-ratio: --estimator must be direct or population");
    const auto tab = walk::ratio_experiment(D, G, z0, p, parse_list(a.str("t")), a.count("reps"), a.count("seed"),
                                            est == "direct" ? walk::RatioEstimator::direct
                                                            : walk::RatioEstimator::population,
                                            a.integer("batches"));
    o.record.anchor = Anchor::half_domain_ratio;
    json rows = json::array();
    report::Csv csv({"t", "double_ratio", "ci_lo", "ci_hi", "log_double_ratio", "log_halfwidth", "censored",
                     "survival_D", "survival_D_half", "survival_Gamma", "survival_Gamma_half"});
    std::vector<double> ts, logs;
    for (const auto& r : tab.rows) {
        rows.push_back({{"t", r.t},
                        {"double_ratio", r.double_ratio},
                        {"ci", {r.ci.lo, r.ci.hi}},
                        {"log_double_ratio", r.log_double_ratio},
                        {"log_halfwidth", r.log_se},
                        {"censored", r.censored},
                        {"survival", {r.survival[0], r.survival[1], r.survival[2], r.survival[3]}}});
        csv.row({report::num(r.t), report::num(r.double_ratio), report::num(r.ci.lo), report::num(r.ci.hi),
                 report::num(r.log_double_ratio), report::num(r.log_se), r.censored ? "1" : "0",
                 report::num(r.survival[0]), report::num(r.survival[1]), report::num(r.survival[2]),
                 report::num(r.survival[3])});
        if (!r.censored) ts.push_back(r.t), logs.push_back(r.log_double_ratio);
    }
    bool decreasing = ts.size() >= 2;
    for (std::size_t i = 1; i < logs.size(); ++i) decreasing = decreasing && logs[i] < logs[i - 1];
    o.record.payload = {{"estimator", walk::to_string(tab.estimator)},
                        {"n", tab.n},
                        {"reps", tab.reps},
                        {"z0", {z0.x, z0.y}},
                        {"rows", rows},
                        {"decreasing", decreasing}};
    if (ts.size() >= 2) o.record.payload["log_slope"] = ls_slope(ts, logs);
    const double ph = a.num("predict-h");
    if (ph > 0.0) {
        spectral::SpectrumOptions one;
        one.k = 1;
        one.check_mesh = false;
        auto l1 = [&](const SymmetricConvexDomain& d, std::optional<Half> h) {
            return spectral::spectrum(h ? spectral::Region::half(d, *h) : spectral::Region::full(d), ph, one).lambda1;
        };
        const double diff = (l1(D, Half::right) - l1(D, std::nullopt)) - (l1(G, Half::right) - l1(G, std::nullopt));
        o.record.payload["eigen_difference"] = diff;
        o.record.payload["predicted_log_slope"] = -0.5 * diff;  // Brownian time
    }
    o.record.status = decreasing ? "decreasing" : "unresolved";
    o.exit_code = decreasing ? exit_ok : exit_inconclusive;
    o.csv = csv.str();
    if (a.plot && !ts.empty()) o.svg = report::svg_curve(ts, logs, "log double ratio", "t", "log r_D/r_Gamma");
    return o;
}

inline Outcome cmd_walk_survival(const Args& a, Outcome o) {
    const auto D = load_domain(a.str("domain"));
    o.record.config["domain_spec"] = D.to_json();
    const walk::ScaledWalkParams p(a.integer("n"));
    const Point z0 = parse_point(a.str("z0"));
    const double t = a.num("t");
    const auto region = walk::LatticeRegion::domain(D, std::nullopt, p);
    const auto e = walk::survival_mc(region, z0, p, t, a.count("reps"), a.count("seed"));
    o.record.anchor = Anchor::walk_continuum_limit;
    o.record.payload = {{"estimate", e.estimate}, {"ci", {e.ci.lo, e.ci.hi}}, {"survivors", e.survivors},
                        {"reps", e.reps},         {"n", p.n},                {"t", t}};
    if (D.is_rectangle() && t > 0.0) {
        using interval::IntervalKind;
        const double sx = interval::survival_1d(IntervalKind::sym, z0.x / D.a(), t / (2.0 * D.a() * D.a())).value;
        const double sy = interval::survival_1d(IntervalKind::sym, z0.y / D.b(), t / (2.0 * D.b() * D.b())).value;
        o.record.payload["closed_form"] = sx * sy;
        o.record.payload["within_ci"] = e.ci.contains(sx * sy);
    }
    return o;
}

inline json rational_json(const walk::Rational& r) { return r.str(); }

inline Outcome cmd_lemma(const Args& a, Outcome o) {
    const std::string which = a.str("which");
    if (which == "7") {
        o.record.anchor = Anchor::ratio_monotonicity_dp;
        json cases = json::array();
        std::uint64_t total = 0, violations = 0;
        auto one = [&](const std::vector<int>& f, const std::vector<int>& g, int i0, bool keep) {
            const auto r = walk::lemma7_check(f, g, i0);
            ++total;
            violations += !r.holds;
            if (keep || !r.holds)
                cases.push_back({{"f", f},
                                 {"g", g},
                                 {"i0", i0},
                                 {"ratio_f", rational_json(r.ratio_f)},
                                 {"ratio_g", rational_json(r.ratio_g)},
                                 {"holds", r.holds}});
        };
        if (a.has("f")) {
            const auto f = parse_int_list(a.str("f"));
            const auto g = a.has("g") ? parse_int_list(a.str("g")) : f;
            one(f, g, a.integer("i0"), true);
        }
        const auto N = a.count("random");
        const int max_m = a.integer("m"), max_h = a.integer("max-height");
        require(N == 0 || (max_m >= 1 && max_h >= 2), ErrorKind::invalid_argument,
                "lemma-check: need --m >= 1 and --max-height >= 2");
        for (std::uint64_t k = 0; k < N; ++k) {
            const CounterRng rng(a.count("seed"), k);
            const int m = 1 + static_cast<int>(rng.uniform(1000) * max_m);
            auto [f, g] = walk::random_profile_pair(m, max_h, rng);
            // Below min f the walk can survive by holding still.
            const int floor_f = *std::min_element(f.begin(), f.end());
            const int i0 = 1 + static_cast<int>(rng.uniform(1001) * (floor_f - 1));
            one(f, g, i0, k < 5);
        }
        require(total > 0, ErrorKind::invalid_argument, "lemma-check: give --f/--g/--i0 or --random N");
        o.record.payload = {{"instances", total}, {"violations", violations}, {"cases", cases}};
        o.record.status = violations == 0 ? "all-hold" : "violated";
        o.exit_code = violations == 0 ? exit_ok : exit_error;
        return o;
    }
    if (which == "product") {
        o.record.anchor = Anchor::product_independence;
        const auto N = std::max<std::uint64_t>(1, a.count("random"));
        const int max_m = a.integer("m"), max_w = a.integer("max-height");
        require(max_m >= 1 && max_w >= 2, ErrorKind::invalid_argument, "lemma-check: need --m >= 1, --max-height >= 2");
        std::uint64_t mismatches = 0;
        json cases = json::array();
        for (std::uint64_t k = 0; k < N; ++k) {
            const CounterRng rng(a.count("seed"), k);
            std::uint64_t c = 0;
            auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform(c++) * (hi - lo + 1)); };
            const int A = draw(2, max_w), B = draw(2, max_w), m = draw(0, max_m);
            const int i0 = draw(1, A - 1), j0 = draw(1, B - 1);
            const walk::Rational two_d = walk::rectangle_survival_2d(A, B, i0, j0, m);
            const walk::Rational px = walk::survival_between<walk::Rational>(std::vector<int>(m + 1, 0),
                                                                             std::vector<int>(m + 1, A), i0);
            const walk::Rational py = walk::survival_between<walk::Rational>(std::vector<int>(m + 1, 0),
                                                                             std::vector<int>(m + 1, B), j0);
            const bool equal = two_d == px * py;
            mismatches += !equal;
            if (k < 5 || !equal)
                cases.push_back({{"A", A}, {"B", B}, {"i0", i0}, {"j0", j0}, {"m", m},
                                 {"survival_2d", rational_json(two_d)}, {"product", rational_json(px * py)},
                                 {"equal", equal}});
        }
        o.record.payload = {{"instances", N}, {"mismatches", mismatches}, {"cases", cases}};
        o.record.status = mismatches == 0 ? "exact" : "mismatch";
        o.exit_code = mismatches == 0 ? exit_ok : exit_error;
        return o;
    }
    if (which == "9") {
        o.record.anchor = Anchor::pinched_ratio_contraction;
        const walk::ScaledWalkParams p(a.integer("n"));
        const double u0 = walk::snap_to_lattice(a.num("u0"), p.n, &o.record.warnings, "u0");
        const double x0 = walk::snap_to_lattice(a.num("x0"), p.n, &o.record.warnings, "x0");
        const double d = certify::d_of(u0);
        const int K = interval::waiting_constant(u0, certify::eps_of(u0));
        const auto hits = a.has("hits") ? parse_list(a.str("hits")) : std::vector<double>{};
        const auto r = walk::lemma9_style_check(u0, hits, a.num("T"), x0, p, d, K);
        o.record.payload = {{"u0", u0},
                            {"x0", x0},
                            {"n", p.n},
                            {"d", d},
                            {"K0", K},
                            {"hits", hits},
                            {"hypothesis_met", r.hypothesis_met},
                            {"message", r.message}};
        if (r.hypothesis_met) {
            o.record.payload["pinched_ratio"] = static_cast<double>(r.pinched_ratio);
            o.record.payload["full_ratio"] = static_cast<double>(r.full_ratio);
            o.record.payload["bound"] = static_cast<double>(r.bound);
            o.record.payload["holds"] = r.holds;
            o.record.payload["pinch_monotone"] = r.pinch_monotone;
        }
        o.record.status = !r.hypothesis_met ? "hypothesis-unmet" : (r.holds ? "holds" : "fails-at-this-n");
        o.exit_code = !r.hypothesis_met ? exit_ok : (r.holds ? exit_ok : exit_inconclusive);
        return o;
    }
    fail(ErrorKind::invalid_argument, "lemma-check: --which must be 7, 9 or product");
}

inline Outcome cmd_conditioned(const Args& a, Outcome o) {
    const auto domain = load_domain(a.str("domain"));
    o.record.config["domain_spec"] = domain.to_json();
    const auto half = parse_half(a.str("half"));
    require(half.has_value(), ErrorKind::invalid_argument, "conditioned: --half must be right or top");
    const double h = a.num("h"), v0 = a.num("v0");
    const int J = a.integer("J");
    const auto reps = a.count("reps");
    const auto seed = a.count("seed");
    o.record.anchor = Anchor::conditioned_process;

    const conditioned::ConditionedChain chain(domain, *half, h, 1.0, J);
    const Eigen::VectorXd drift = chain.psi().transpose() * chain.step() - chain.psi().transpose();
    const auto est = conditioned::estimate_C0(chain, v0, reps, seed);

    json sweep = json::array();
    report::Csv csv({"J", "estimate", "ci_lo", "ci_hi", "chain_value"});
    std::vector<int> Js = {4, 8, 16};
    if (std::find(Js.begin(), Js.end(), J) == Js.end()) Js.push_back(J);
    std::sort(Js.begin(), Js.end());
    for (int j : Js) {
        const conditioned::ConditionedChain cj(domain, *half, h, 1.0, j);
        const auto e = conditioned::estimate_C0(cj, v0, reps, seed);
        sweep.push_back({{"J", j}, {"estimate", e.estimate}, {"ci", {e.ci.lo, e.ci.hi}}, {"chain_value", e.exact}});
        csv.row({std::to_string(j), report::num(e.estimate), report::num(e.ci.lo), report::num(e.ci.hi),
                 report::num(e.exact)});
    }
    json ergodic = json::array();
    bool exceedance_increasing = true;
    double prev_p08 = -1.0;
    if (a.has("m")) {
        // threshold is the Monte Carlo estimate of C0
        for (int m : parse_int_list(a.str("m"))) {
            const auto rep = conditioned::ergodic_fraction(chain, v0, m, a.count("ergodic-reps"), seed, est.estimate);
            exceedance_increasing = exceedance_increasing && rep.p_above_08 > prev_p08;
            prev_p08 = rep.p_above_08;
            ergodic.push_back({{"m", m},
                               {"mean", rep.mean},
                               {"variance", rep.variance},
                               {"p_above_0.8C0", rep.p_above_08},
                               {"p_above_0.7C0", rep.p_above_07}});
        }
    }
    json bridge = json::array();
    if (a.has("bridge-t"))
        for (const auto& row : conditioned::bridge_convergence(domain, *half, h, parse_list(a.str("bridge-t"))))
            bridge.push_back({{"t", row.t}, {"max_tv", row.max_tv}});
    const auto lower = certify::c0_lower(v0);
    o.record.payload = {{"nodes", chain.grid().size()},
                        {"stationarity_residual", drift.cwiseAbs().maxCoeff()},
                        {"estimate", est.estimate},
                        {"ci", {est.ci.lo, est.ci.hi}},
                        {"chain_value", est.exact},
                        {"J_sweep", sweep},
                        {"ergodic", ergodic},
                        {"exceedance_increasing", exceedance_increasing},
                        {"bridge", bridge},
                        {"C0_lower", lower.to_json()},
                        {"above_lower_bound", lower.log < std::log(std::max(est.estimate, 1e-300))}};
    o.csv = csv.str();
    if (a.plot) {
        std::vector<double> xs, ys, vs;
        for (int i = 0; i < chain.grid().size(); ++i) {
            const Point p = chain.grid().point(i);
            xs.push_back(p.x), ys.push_back(p.y), vs.push_back(chain.psi()(i));
        }
        o.svg = report::svg_heatmap(xs, ys, vs, h, "stationary density");
    }
    return o;
}

inline Outcome cmd_interval(const Args& a, Outcome o) {
    using interval::IntervalKind;
    o.record.anchor = Anchor::ultracontractivity;
    const auto times = parse_list(a.str("t"));
    const int pts = a.integer("grid");
    require(pts >= 1, ErrorKind::invalid_argument, "interval: --grid must be positive");
    std::vector<IntervalKind> kinds;
    const std::string k = a.str("kind");
    if (k == "unit" || k == "both") kinds.push_back(IntervalKind::unit);
    if (k == "sym" || k == "both") kinds.push_back(IntervalKind::sym);
    require(!kinds.empty(), ErrorKind::invalid_argument, "interval: --kind must be unit, sym or both");
    json rows = json::array();
    report::Csv csv({"kind", "t", "c", "C", "min_ratio", "max_ratio", "sandwich_holds"});
    bool all_hold = true, shrinking = true;
    for (auto kind : kinds) {
        double prev_series = INFINITY, prev_lower_gap = INFINITY;
        for (double t : times) {
            const auto b = interval::uc_bounds(kind, t);
            double lo = INFINITY, hi = -INFINITY;
            const double left = interval::left_end(kind), len = interval::length(kind);
            for (int i = 1; i <= pts; ++i)
                for (int j = 1; j <= pts; ++j) {
                    const double x = left + len * i / (pts + 1), y = left + len * j / (pts + 1);
                    const double r = interval::normalized_kernel_ratio(kind, t, x, y);
                    lo = std::min(lo, r), hi = std::max(hi, r);
                }
            const bool holds = b.lower <= lo && hi <= b.upper;
            all_hold = all_hold && holds;
            // C - 1 = 1 - c = S(t) until c clips at 0; S itself keeps resolving where 1 + S rounds to 1.
            shrinking = shrinking && b.series < prev_series && (1.0 - b.lower) <= prev_lower_gap;
            prev_series = b.series, prev_lower_gap = 1.0 - b.lower;
            rows.push_back({{"kind", interval::to_string(kind)},
                            {"t", t},
                            {"c", b.lower},
                            {"C", b.upper},
                            {"series", b.series},
                            {"terms", b.terms},
                            {"tail_bound", b.tail_bound},
                            {"min_ratio", lo},
                            {"max_ratio", hi},
                            {"sandwich_holds", holds}});
            csv.row({interval::to_string(kind), report::num(t), report::num(b.lower), report::num(b.upper),
                     report::num(lo), report::num(hi), holds ? "1" : "0"});
        }
    }
    o.record.payload = {{"rows", rows}, {"sandwich_holds", all_hold}, {"constants_shrink", shrinking}};
    if (a.has("alpha")) {
        const double alpha = a.num("alpha");
        const double eps = a.has("eps") ? a.num("eps") : certify::eps_of(alpha);
        const auto w = interval::waiting_constant_detail(alpha, eps);
        o.record.payload["waiting_constant"] = {{"alpha", alpha},
                                                {"eps", eps},
                                                {"beta", interval::beta(alpha)},
                                                {"gamma", interval::gamma(alpha)},
                                                {"K", w.K},
                                                {"threshold_time", w.threshold_time},
                                                {"unit_ratio", w.unit_ratio},
                                                {"sym_ratio", w.sym_ratio}};
    }
    o.record.status = all_hold ? "sandwich-holds" : "sandwich-violated";
    o.exit_code = all_hold ? exit_ok : exit_error;
    o.csv = csv.str();
    return o;
}

inline Outcome cmd_certify(const Args& a, Outcome o) {
    o.record.anchor = Anchor::explicit_gap_bound;
    const auto c = certify::certificate(a.num("u0"), a.num("v0"), a.integer("q"));
    o.record.warnings.insert(o.record.warnings.end(), c.warnings.begin(), c.warnings.end());
    o.record.payload = c.to_json();
    bool ok = c.ledger_positive;
    if (a.has("domain")) {
        const auto domain = load_domain(a.str("domain"));
        o.record.config["domain_spec"] = domain.to_json();
        const bool applies = certify::certificate_applies(domain, c.u0, c.v0);
        const auto g = spectral::gap_report(domain, a.num("h"));
        // g_value underflows double; compare in log space.
        const bool bound_ok = g.margin > 0.0 && c.g_value.log <= std::log(g.margin);
        o.record.payload["domain_check"] = {{"omits_point", applies},
                                            {"margin", g.margin},
                                            {"err_est", g.err_est},
                                            {"margin_at_least_g", bound_ok}};
        ok = ok && (!applies || bound_ok);
    }
    o.record.status = ok ? "certified" : "not-certified";
    o.exit_code = ok ? exit_ok : exit_error;
    return o;
}

Outcome execute(const std::vector<std::string>& args);

/// Evaluates one manifest check {path, op, value} against a record.
inline bool check_passes(const json& record, const json& check, std::string& why) {
    const std::string path = check.at("path").get<std::string>();
    const std::string op = check.value("op", "==");
    const json& want = check.at("value");
    const json::json_pointer ptr(path);
    if (!record.contains(ptr)) {
        why = path + " missing";
        return false;
    }
    const json& got = record.at(ptr);
    bool ok = false;
    if (op == "==")
        ok = got == want;
    else if (op == "!=")
        ok = got != want;
    else {
        require(got.is_number() && want.is_number(), ErrorKind::invalid_argument,
                "manifest check " + path + ": operator " + op + " needs numbers");
        const double g = got.get<double>(), w = want.get<double>();
        if (op == "<") ok = g < w;
        else if (op == "<=") ok = g <= w;
        else if (op == ">") ok = g > w;
        else if (op == ">=") ok = g >= w;
        else if (op == "abs<") ok = std::abs(g) < w;
        else fail(ErrorKind::invalid_argument, "manifest check: unknown operator " + op);
    }
    if (!ok) why = path + " = " + got.dump() + " fails " + op + " " + want.dump();
    return ok;
}

inline Outcome cmd_reproduce_all(const Args& a, Outcome o, const std::string& out_dir) {
    o.record.anchor = Anchor::acceptance_summary;
    const json manifest = read_json_file(a.str("manifest"));
    const json entries = manifest.is_array() ? manifest : manifest.value("experiments", json::array());
    require(entries.is_array(), ErrorKind::invalid_argument, "manifest must list experiments");
    json rows = json::array();
    report::Csv csv({"index", "anchor", "experiment", "result", "exit_code", "detail"});
    int failed = 0, inconclusive = 0;
    bool halted = false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const json& e = entries[i];
        const std::string anchor = e.value("anchor", "");
        std::vector<std::string> args = e.at("args").get<std::vector<std::string>>();
        json row{{"index", i}, {"anchor", anchor}, {"args", args}};
        if (!out_dir.empty()) {
            args.push_back("--out");
            args.push_back((std::filesystem::path(out_dir) / ("run-" + std::to_string(i))).string());
        }
        std::string result, detail;
        int code = exit_error;
        try {
            const Outcome sub = execute(args);
            code = sub.exit_code;
            const json rec = sub.record.to_json();
            if (!out_dir.empty()) {
                const auto dir = std::filesystem::path(out_dir) / ("run-" + std::to_string(i));
                report::write_file(dir / (sub.record.experiment + ".json"), rec.dump(2) + "\n");
                if (!sub.csv.empty()) report::write_file(dir / (sub.record.experiment + ".csv"), sub.csv);
            }
            std::vector<std::string> why;
            if (!anchor.empty() && rec.at("anchor") != anchor) why.push_back("anchor is " + rec.at("anchor").dump());
            for (const auto& c : e.value("checks", json::array())) {
                std::string w;
                if (!check_passes(rec, c, w)) why.push_back(w);
            }
            const auto expect = e.value("expect_exit", json::array({0}));
            const bool exit_expected = std::find(expect.begin(), expect.end(), json(code)) != expect.end();
            if (!why.empty() || (!exit_expected && code != exit_inconclusive)) {
                result = "fail";
                if (!exit_expected) why.push_back("exit code " + std::to_string(code));
            } else if (!exit_expected) {
                result = "inconclusive";
            } else {
                result = "pass";
            }
            for (const auto& w : why) detail += (detail.empty() ? "" : "; ") + w;
        } catch (const std::exception& ex) {
            result = "error";
            detail = ex.what();
            halted = true;
        }
        row["result"] = result;
        row["exit_code"] = code;
        row["detail"] = detail;
        rows.push_back(row);
        csv.row({std::to_string(i), anchor, args.empty() ? "" : args.front(), result, std::to_string(code), detail});
        failed += result == "fail" || result == "error";
        inconclusive += result == "inconclusive";
        if (halted) break;
    }
    json by_anchor = json::object();
    for (const auto& r : rows) {
        const std::string key = r.at("anchor").get<std::string>().empty() ? "unlabelled" : r.at("anchor").get<std::string>();
        by_anchor[key].push_back(r.at("result"));
    }
    o.record.payload = {{"entries", entries.size()},
                        {"executed", rows.size()},
                        {"halted", halted},
                        {"failed", failed},
                        {"inconclusive", inconclusive},
                        {"rows", rows},
                        {"by_anchor", by_anchor}};
    o.record.status = failed ? "fail" : (inconclusive ? "inconclusive" : "pass");
    o.exit_code = failed ? exit_error : (inconclusive ? exit_inconclusive : exit_ok);
    o.csv = csv.str();
    return o;
}

// ---------------------------------------------------------------------------

struct Parsed {
    std::string command;
    Args args;
    json config;
    std::string out_dir;
};

inline void build_app(CLI::App& app, std::map<std::string, std::map<std::string, std::string>>& store,
                      std::string& out_dir, bool& plot) {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    app.add_option("--out", out_dir, "Output directory for JSON/CSV/SVG files");
    app.add_flag("--plot", plot, "Also write an SVG view");
    app.fallthrough();

    auto opt = [&](CLI::App* sub, const std::string& name, const std::string& def, const std::string& help,
                   bool required = false) {
        auto& slot = store[sub->get_name()][name];
        slot = def;
        auto* o = sub->add_option("--" + name, slot, help);
        if (required) o->required();
        else o->default_str(def);
    };
    // "--h" is the mesh width, so subcommands answer only to --help.
    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->set_help_flag("--help", "Print this help message and exit");
        return sub;
    };

    auto* s = add("spectrum", "Lowest Dirichlet eigenvalues with Richardson extrapolation");
    opt(s, "domain", "", "Domain JSON file", true);
    opt(s, "half", "full", "full, right or top");
    opt(s, "h", "1/32", "Mesh width (levels 2h, h, h/2)");

    s = add("gap-compare", "Domain gap against the bounding-rectangle gap");
    opt(s, "domain", "", "Domain JSON file", true);
    opt(s, "h", "1/32", "Mesh width");

    s = add("payne", "Second eigenvalue against the half-domain ground states");
    opt(s, "domain", "", "Domain JSON file", true);
    opt(s, "h", "1/32", "Mesh width");

    s = add("slit-demo", "Gap of the slit square for a list of slit openings");
    opt(s, "eps", "0.8,0.4,0.2,0.1", "Comma-separated openings");
    opt(s, "h", "1/40", "Mesh width; every level must resolve each eps");

    s = add("walk-ratio", "Monte Carlo half-domain survival double ratio");
    opt(s, "domain", "", "Domain D (JSON)", true);
    opt(s, "gamma", "", "Enclosing domain (JSON); default (-1,1)^2");
    opt(s, "z0", "0.25,0", "Start point in D+");
    opt(s, "n", "5", "Walk scale");
    opt(s, "t", "1,2,4,8", "Brownian times");
    opt(s, "reps", "100000", "Replicas (particles in total for the population estimator)");
    opt(s, "seed", "7", "Seed");
    opt(s, "estimator", "population", "direct or population");
    opt(s, "batches", "10", "Independent batches for the population estimator");
    opt(s, "predict-h", "0", "Mesh width for the eigenvalue slope prediction (0 skips)");

    s = add("walk-survival", "Monte Carlo survival probability of the scaled walk");
    opt(s, "domain", "", "Domain JSON file", true);
    opt(s, "z0", "0,0", "Start point");
    opt(s, "n", "4", "Walk scale");
    opt(s, "t", "1", "Brownian time");
    opt(s, "reps", "100000", "Replicas");
    opt(s, "seed", "1", "Seed");

    s = add("lemma-check", "Exact DP checks of the discrete ratio inequalities");
    opt(s, "which", "7", "7, 9 or product");
    opt(s, "random", "0", "Number of random instances");
    opt(s, "m", "12", "Largest horizon for random instances");
    opt(s, "max-height", "6", "Largest profile height or rectangle side");
    opt(s, "seed", "1", "Seed");
    opt(s, "f", "", "Explicit profile f(0..m)");
    opt(s, "g", "", "Explicit profile g(0..m)");
    opt(s, "i0", "1", "Start for explicit profiles");
    opt(s, "u0", "0.5", "Pinch half-width");
    opt(s, "x0", "0.5", "Start point in (0,1)");
    opt(s, "hits", "", "Pinch times (Brownian)");
    opt(s, "T", "10", "Horizon (Brownian)");
    opt(s, "n", "3", "Walk scale");

    s = add("conditioned", "Conditioned chain on a half domain: C0, ergodic fractions, mixing");
    opt(s, "domain", "", "Domain JSON file", true);
    opt(s, "half", "right", "right or top");
    opt(s, "v0", "0.5", "Level separating the window sets");
    opt(s, "h", "1/16", "Mesh width of the dense kernel");
    opt(s, "J", "8", "Checkpoints per window");
    opt(s, "reps", "100000", "Replicas for C0");
    opt(s, "seed", "1", "Seed");
    opt(s, "m", "", "Horizons for ergodic fractions");
    opt(s, "ergodic-reps", "2000", "Paths per ergodic horizon");
    opt(s, "bridge-t", "", "Window lengths for the mixing check");

    s = add("interval", "One-dimensional ultracontractivity constants and waiting times");
    opt(s, "kind", "both", "unit, sym or both");
    opt(s, "t", "0.5,1,2,5", "Heat times");
    opt(s, "grid", "20", "Points per axis for the sandwich check");
    opt(s, "alpha", "", "Also compute the waiting constant at this alpha");
    opt(s, "eps", "", "Slack for the waiting constant (default eps(alpha))");

    s = add("certify", "Explicit lower bound on the gap excess for an omitted point");
    opt(s, "u0", "0.5", "Omitted point, x");
    opt(s, "v0", "0.625", "Omitted point, y");
    opt(s, "q", "4", "Lattice exponent");
    opt(s, "domain", "", "Optional domain to check against the bound");
    opt(s, "h", "1/32", "Mesh width for the domain check");

    s = add("reproduce-all", "Run a manifest of experiments and summarize by anchor");
    opt(s, "manifest", "configs/manifest.json", "Manifest JSON file");
}

inline Outcome execute(const std::vector<std::string>& args) {
    CLI::App app("gapkit: Dirichlet spectral gaps of doubly symmetric convex domains", "gapkit");
    std::map<std::string, std::map<std::string, std::string>> store;
    std::string out_dir;
    bool plot = false;
    build_app(app, store, out_dir, plot);
    if (!args.empty() && !args[0].empty() && args[0][0] != '-')
        require(app.get_subcommand_no_throw(args[0]) != nullptr, ErrorKind::invalid_argument,
                "unknown subcommand '" + args[0] + "'");
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);

    const CLI::App* sub = app.get_subcommands().front();
    Outcome o;
    o.record.experiment = sub->get_name();
    o.record.config = {{"subcommand", sub->get_name()}, {"options", echo_options(*sub)}, {"plot", plot}};
    Args a{store[sub->get_name()], plot};
    const std::string& name = sub->get_name();
    if (name == "spectrum") return cmd_spectrum(a, std::move(o));
    if (name == "gap-compare") return cmd_gap_compare(a, std::move(o));
    if (name == "payne") return cmd_payne(a, std::move(o));
    if (name == "slit-demo") return cmd_slit(a, std::move(o));
    if (name == "walk-ratio") return cmd_walk_ratio(a, std::move(o));
    if (name == "walk-survival") return cmd_walk_survival(a, std::move(o));
    if (name == "lemma-check") return cmd_lemma(a, std::move(o));
    if (name == "conditioned") return cmd_conditioned(a, std::move(o));
    if (name == "interval") return cmd_interval(a, std::move(o));
    if (name == "certify") return cmd_certify(a, std::move(o));
    if (name == "reproduce-all") return cmd_reproduce_all(a, std::move(o), out_dir);
    fail(ErrorKind::invalid_argument, "unknown subcommand " + name);
}

/// Output directory named by --out, if any, without running anything.
inline std::string out_dir_of(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--out") return args[i + 1];
    for (const auto& s : args)
        if (s.rfind("--out=", 0) == 0) return s.substr(6);
    return "";
}

/// Runs one command line: prints the record to `out`, writes files under
/// --out, reports errors on `err`. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        const Outcome o = execute(args);
        const json rec = o.record.to_json();
        out << rec.dump(2) << "\n";
        const std::string dir = out_dir_of(args);
        if (!dir.empty()) {
            const std::filesystem::path base(dir);
            report::write_file(base / (o.record.experiment + ".json"), rec.dump(2) + "\n");
            if (!o.csv.empty()) report::write_file(base / (o.record.experiment + ".csv"), o.csv);
            if (!o.svg.empty()) report::write_file(base / (o.record.experiment + ".svg"), o.svg);
        }
        return o.exit_code;
    } catch (const CLI::CallForHelp& e) {
        CLI::App app("gapkit: Dirichlet spectral gaps of doubly symmetric convex domains", "gapkit");
        std::map<std::string, std::map<std::string, std::string>> store;
        std::string d;
        bool p = false;
        build_app(app, store, d, p);
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "gapkit: " << e.what() << "\n";
        return exit_error;
    } catch (const Error& e) {
        err << "gapkit: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        err << "gapkit: " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace gapkit::cli
