#pragma once

// Explicit lower bound g(u0, v0) on gap(D) - gap(S) for a convex doubly
// symmetric D inside S = (-1,1)² that omits (u0, v0), assembled from
// closed-form interval quantities and rectangle heat-kernel bounds.
//
// Time is Brownian: p_1 denotes the kernel of standard Brownian motion at
// time 1, i.e. the heat semigroup at heat time 1/2, and eigenvalues in the
// final inequality are those of -Delta/2. The bound therefore also holds,
// with room to spare, for -Delta eigenvalues.
//
// Several intermediate constants are far below the smallest double, so
// positive quantities are carried as natural logarithms.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapkit/error.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/interval.hpp"

namespace gapkit::certify {

inline constexpr double pi = std::numbers::pi;

/// A positive real stored as its natural logarithm.
struct LogReal {
    double log = -std::numeric_limits<double>::infinity();

    static LogReal of(double x) {
        require(x >= 0.0, ErrorKind::invalid_argument, "LogReal: negative value");
        return {std::log(x)};
    }
    static LogReal from_log(double l) { return {l}; }

    bool positive() const { return log > -std::numeric_limits<double>::infinity(); }
    double value() const { return std::exp(log); }  // 0 on underflow

    friend LogReal operator*(LogReal a, LogReal b) { return {a.log + b.log}; }
    friend LogReal operator/(LogReal a, LogReal b) { return {a.log - b.log}; }
    friend LogReal operator*(LogReal a, double b) { return a * of(b); }
    LogReal pow(double p) const { return {log * p}; }
    friend bool operator<(LogReal a, LogReal b) { return a.log < b.log; }
    friend bool operator<=(LogReal a, LogReal b) { return a.log <= b.log; }

    std::string to_string() const {
        const double v = value();
        char buf[96];
        if (v > 0.0 && std::isfinite(v))
            std::snprintf(buf, sizeof buf, "%.6e", v);
        else
            std::snprintf(buf, sizeof buf, "exp(%.6e)", log);
        return buf;
    }

    nlohmann::json to_json() const { return {{"log", log}, {"value", to_string()}}; }
};

inline LogReal min(LogReal a, LogReal b) { return a.log <= b.log ? a : b; }

/// d(u0) = (beta(u0)/gamma(u0) + 1)/2, the per-pinch contraction factor.
inline double d_of(double u0) { return (interval::beta(u0) / interval::gamma(u0) + 1.0) / 2.0; }

/// Slack eps(u0): half the largest eps with
/// (beta+eps)/(gamma-eps) < (d + beta/gamma)/2.
inline double eps_of(double u0) {
    const double b = interval::beta(u0), g = interval::gamma(u0);
    const double M = (d_of(u0) + b / g) / 2.0;
    const double eps_max = (M * g - b) / (1.0 + M);
    return eps_max / 2.0;
}

/// The density-margin width: outside D+_gamma the stationary law of the
/// conditioned process has mass at most 1/2.
/// gamma = [6 sqrt2 (e^{3pi²}/2pi)² 2]^{-1} / 2.
inline LogReal gamma_margin() {
    const double l = -std::log(2.0) - std::log(12.0 * std::sqrt(2.0)) - 2.0 * (3.0 * pi * pi - std::log(2.0 * pi));
    return LogReal::from_log(l);
}

namespace detail {

// Lower bound on log p^{(0,len)}_t(x, len - r), heat time t, from the leading
// term and |sin k u| <= k |sin u|, or from the certified series when tighter.
// The second point is given by its distance r to the right end so that tiny
// offsets survive rounding.
inline double log_interval_kernel_lower(double len, double t, double x, double r) {
    const double c = pi * pi / (len * len);
    auto term = [&](int k) { return double(k) * k * std::exp(-c * (double(k) * k - 1.0) * t); };
    const interval::SeriesValue sum = interval::detail::certified_sum(term, 1.0, 2, c, 1.0, t, 2, 1, "beta_rect");
    const double tail = sum.value + sum.error_bound;
    double best = -std::numeric_limits<double>::infinity();
    if (tail < 1.0) {
        const double sx = std::sin(pi * x / len), sy = std::sin(pi * r / len);
        best = std::log(2.0 / len) + std::log(sx) + std::log(sy) - c * t + std::log1p(-tail);
    }
    // Scaled series on (0,1) at heat time t/len².
    const double tau = t / (len * len);
    if (tau > 1e-6 && x / len > 1e-9 && r / len > 1e-9) {
        const interval::SeriesValue s =
            interval::heat_kernel_1d(interval::IntervalKind::unit, tau, x / len, 1.0 - r / len);
        const double lo = s.value - s.error_bound;
        if (lo > 0.0) best = std::max(best, std::log(lo / len));
    }
    return best;
}

// log of the kernel bound for a len_short x len_long rectangle, points on
// the centre line at distance s/2 from the short sides.
inline double log_rect_kernel(double s, double len) {
    constexpr double t = 0.5;  // Brownian time 1
    return log_interval_kernel_lower(s, t, s / 2.0, s / 2.0) +
           log_interval_kernel_lower(len, t, s / 2.0, s / 2.0);
}

}  // namespace detail

/// beta(s): lower bound on p_1^R(z, w) over rectangles R with short side s
/// and long side at most 3, z and w at distance s/2 from three sides.
/// Minimized over the long side; positive and increasing in s.
inline LogReal beta_rect(double s) {
    require(s > 0.0 && s <= 3.0, ErrorKind::invalid_argument, "beta_rect: s must lie in (0,3]");
    constexpr double long_max = 3.0;
    auto f = [&](double len) { return detail::log_rect_kernel(s, len); };
    if (s >= long_max) return LogReal::from_log(f(long_max));
    // Coarse scan then golden-section refinement around the best node.
    constexpr int nodes = 21;
    double best_len = long_max, best = f(long_max);
    for (int i = 0; i < nodes; ++i) {
        const double len = s + (long_max - s) * i / (nodes - 1);
        const double v = f(len);
        if (v < best) best = v, best_len = len;
    }
    const double width = (long_max - s) / (nodes - 1);
    double lo = std::max(s, best_len - width), hi = std::min(long_max, best_len + width);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2, x2 = x1, f2 = f1;
            x1 = hi - r * (hi - lo), f1 = f(x1);
        } else {
            lo = x1, x1 = x2, f1 = f2;
            x2 = lo + r * (hi - lo), f2 = f(x2);
        }
    }
    best = std::min({best, f1, f2});
    return LogReal::from_log(best);
}

/// Lower bound on C0 = P_psi(F0) for the right half of any admissible D:
/// 2 pi beta(min(gamma, v0/3))² / (4 e^{3pi²}) * v0²/18 * 1/4.
inline LogReal c0_lower(double v0) {
    require(v0 > 0.0 && v0 < 1.0, ErrorKind::invalid_argument, "c0_lower: v0 must lie in (0,1)");
    const LogReal g = gamma_margin();
    const double s = std::min(g.log, std::log(v0 / 3.0));
    const LogReal b = beta_rect(std::exp(s));
    const double l = std::log(2.0 * pi) + 2.0 * b.log - std::log(4.0) - 3.0 * pi * pi + std::log(v0 * v0 / 18.0) -
                     std::log(4.0);
    return LogReal::from_log(l);
}

/// delta0(u, v) = 3 C0 / (5 (K0 + 2)) for one orientation.
struct Orientation {
    double u = 0.0, v = 0.0;
    double beta = 0.0, gamma = 0.0, d = 0.0, eps = 0.0;
    int K0 = 0;
    LogReal beta_min;  // beta_rect(min(gamma_margin, v/3))
    LogReal C0_lower;
    LogReal delta0;
    double log_inv_d = 0.0;
    LogReal bound;  // delta0 log(1/d)
};

inline Orientation orientation(double u, double v) {
    Orientation o;
    o.u = u, o.v = v;
    o.beta = interval::beta(u);
    o.gamma = interval::gamma(u);
    o.d = d_of(u);
    o.eps = eps_of(u);
    o.K0 = interval::waiting_constant(u, o.eps);
    const double s = std::min(gamma_margin().log, std::log(v / 3.0));
    o.beta_min = beta_rect(std::exp(s));
    o.C0_lower = c0_lower(v);
    o.delta0 = o.C0_lower * (3.0 / (5.0 * (o.K0 + 2)));
    o.log_inv_d = -std::log(o.d);
    o.bound = o.delta0 * o.log_inv_d;
    return o;
}

struct Certificate {
    double u0 = 0.0, v0 = 0.0;
    int lattice_q = 0;
    std::vector<std::string> warnings;
    LogReal gamma_margin;
    Orientation primary;   // (u0, v0)
    Orientation rotated;   // (v0, u0)
    LogReal g_value;
    bool ledger_positive = false;

    nlohmann::json to_json() const {
        auto orient = [](const Orientation& o) {
            return nlohmann::json{{"u", o.u},
                                  {"v", o.v},
                                  {"beta", o.beta},
                                  {"gamma", o.gamma},
                                  {"d", o.d},
                                  {"eps", o.eps},
                                  {"K0", o.K0},
                                  {"beta_rect", o.beta_min.to_json()},
                                  {"C0_lower", o.C0_lower.to_json()},
                                  {"delta0", o.delta0.to_json()},
                                  {"log_inv_d", o.log_inv_d},
                                  {"bound", o.bound.to_json()}};
        };
        return {{"u0", u0},
                {"v0", v0},
                {"lattice_q", lattice_q},
                {"warnings", warnings},
                {"gamma_margin", gamma_margin.to_json()},
                {"orientation_uv", orient(primary)},
                {"orientation_vu", orient(rotated)},
                {"g_value", g_value.to_json()},
                {"log_g_value", g_value.log},
                {"ledger_positive", ledger_positive}};
    }
};

/// Snaps x to the 2^-q lattice, recording a warning when it moves.
inline double snap(double x, int q, std::vector<std::string>& warnings, const char* name) {
    const double scale = std::ldexp(1.0, q);
    const double s = std::round(x * scale) / scale;
    if (s != x) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %.17g is not on the 2^-%d lattice; snapped to %.17g", name, x, q, s);
        warnings.emplace_back(buf);
    }
    return s;
}

/// g(u0, v0) = min(delta0(u0,v0) log(1/d(u0)), delta0(v0,u0) log(1/d(v0))).
/// The bounding square must be S = (-1,1)²; a != b is refused.
inline Certificate certificate(double u0, double v0, int q = 4, double a = 1.0, double b = 1.0) {
    require(a == 1.0 && b == 1.0, ErrorKind::precondition,
            "certificate: only the square S = (-1,1)^2 is supported (a = b = 1)");
    require(q >= 1 && q <= 30, ErrorKind::invalid_argument, "certificate: lattice exponent q must lie in [1,30]");
    Certificate c;
    c.lattice_q = q;
    c.u0 = snap(u0, q, c.warnings, "u0");
    c.v0 = snap(v0, q, c.warnings, "v0");
    require(c.u0 > 0.0 && c.u0 < 1.0 && c.v0 > 0.0 && c.v0 < 1.0, ErrorKind::invalid_argument,
            "certificate: (u0, v0) must lie in (0,1)^2 after snapping");
    c.gamma_margin = gamma_margin();
    c.primary = orientation(c.u0, c.v0);
    c.rotated = orientation(c.v0, c.u0);
    c.g_value = min(c.primary.bound, c.rotated.bound);
    auto pos = [](const Orientation& o) {
        return o.d < 1.0 && o.d > 0.0 && o.eps > 0.0 && o.K0 >= 1 && o.C0_lower.positive() &&
               o.delta0.positive() && o.log_inv_d > 0.0 && o.bound.positive() && o.beta_min.positive();
    };
    c.ledger_positive = pos(c.primary) && pos(c.rotated) && c.gamma_margin.positive() && c.g_value.positive();
    return c;
}

/// True when the domain omits (u0, v0), the hypothesis under which g bounds
/// gap(D) - gap(S) from below.
inline bool certificate_applies(const SymmetricConvexDomain& d, double u0, double v0) {
    return d.a() <= 1.0 && d.b() <= 1.0 && excluded_witness(d, {u0, v0});
}

}  // namespace gapkit::certify
