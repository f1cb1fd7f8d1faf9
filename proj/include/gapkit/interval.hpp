#pragma once

// Closed-form toolkit for the Dirichlet heat semigroup e^{t d²/dx²} on the
// intervals (0,1) and (-1,1).
//
// Times here are heat times: the eigenvalues are those of -d²/dx². Brownian
// motion with unit variance per unit time at time s corresponds to heat time
// s/2; waiting_constant() works in Brownian time and converts internally.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "gapkit/error.hpp"

namespace gapkit::interval {

enum class IntervalKind { unit, sym };

inline const char* to_string(IntervalKind k) { return k == IntervalKind::unit ? "unit" : "sym"; }

inline constexpr double pi = std::numbers::pi;

/// Term cutoff and iteration cap for all series in this module.
inline constexpr double term_cutoff = 1e-18;
inline constexpr int max_terms = 200000;

inline double length(IntervalKind kind) { return kind == IntervalKind::unit ? 1.0 : 2.0; }
inline double left_end(IntervalKind kind) { return kind == IntervalKind::unit ? 0.0 : -1.0; }

/// lambda_k = k² pi² / |I|².
inline double eigenvalue(IntervalKind kind, int k) {
    const double l = length(kind);
    return k * k * pi * pi / (l * l);
}

/// L²-orthonormal Dirichlet eigenfunctions sqrt(2/|I|) sin(k pi (x - left)/|I|).
inline double eigenfunction(IntervalKind kind, int k, double x) {
    const double l = length(kind);
    return std::sqrt(2.0 / l) * std::sin(k * pi * (x - left_end(kind)) / l);
}

/// Ground state normalized to integrate to one: (pi/2) sin(pi x) on (0,1),
/// (pi/4) cos(pi x / 2) on (-1,1).
inline double ground_state(IntervalKind kind, double x) {
    if (kind == IntervalKind::unit) return pi / 2.0 * std::sin(pi * x);
    return pi / 4.0 * std::cos(pi * x / 2.0);
}

inline bool interior(IntervalKind kind, double x) {
    return x > left_end(kind) && x < left_end(kind) + length(kind);
}

/// beta(alpha) = fraction of the squared (0,1) ground state on (0, alpha).
inline double beta(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_argument, "beta: alpha must lie in (0,1)");
    return alpha - std::sin(2.0 * pi * alpha) / (2.0 * pi);
}

/// gamma(alpha) = fraction of the squared (-1,1) ground state on |x| < alpha.
inline double gamma(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_argument, "gamma: alpha must lie in (0,1)");
    return alpha + std::sin(pi * alpha) / pi;
}

/// A truncated series value with a rigorous bound on the discarded tail.
struct SeriesValue {
    double value = 0.0;
    double error_bound = 0.0;
    int terms = 0;
};

namespace detail {

// Bound on sum_{j > k} amp * j^power * exp(-c (j² - shift) t) given that the
// ratio of consecutive terms is at most exp(-c (2k+3) t) * ((k+2)/(k+1))^power.
inline double geometric_tail(double amp, int power, double c, double shift, double t, int k) {
    const double next = k + 1.0;
    const double first = amp * std::pow(next, power) * std::exp(-c * (next * next - shift) * t);
    const double ratio = std::exp(-c * (2.0 * next + 1.0) * t) * std::pow((next + 1.0) / next, power);
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return first / (1.0 - ratio);
}

// Sums sum_k term(k) over k = first, first+stride, ... until the envelope
// amp * k^power * exp(-c (k² - shift) t) drops below term_cutoff; then adds a
// geometric certificate for the remainder.
template <class Term>
SeriesValue certified_sum(Term&& term, double amp, int power, double c, double shift, double t,
                          int first, int stride, const char* what) {
    SeriesValue out;
    int k = first;
    for (; k < max_terms; k += stride) {
        out.value += term(k);
        ++out.terms;
        const double envelope = amp * std::pow(double(k), power) * std::exp(-c * (double(k) * k - shift) * t);
        if (envelope < term_cutoff && k > 1) break;
    }
    if (k >= max_terms)
        fail(ErrorKind::numerical, std::string(what) + ": time too small for a certified tail; increase t");
    out.error_bound = geometric_tail(amp, power, c, shift, t, k);
    if (!std::isfinite(out.error_bound))
        fail(ErrorKind::numerical, std::string(what) + ": tail certificate failed; increase t");
    return out;
}

}  // namespace detail

/// Dirichlet heat kernel p_t(x, y) = sum_k exp(-lambda_k t) e_k(x) e_k(y).
inline SeriesValue heat_kernel_1d(IntervalKind kind, double t, double x, double y) {
    require(t > 0.0, ErrorKind::invalid_argument, "heat_kernel_1d: t must be positive");
    require(interior(kind, x) && interior(kind, y), ErrorKind::invalid_argument,
            "heat_kernel_1d: x and y must be interior points");
    const double c = eigenvalue(kind, 1);
    auto term = [&](int k) {
        return std::exp(-eigenvalue(kind, k) * t) * eigenfunction(kind, k, x) * eigenfunction(kind, k, y);
    };
    return detail::certified_sum(term, 2.0 / length(kind), 0, c, 0.0, t, 1, 1, "heat_kernel_1d");
}

/// P_x(tau > t): only odd modes survive integration of the kernel.
inline SeriesValue survival_1d(IntervalKind kind, double x, double t) {
    require(t >= 0.0, ErrorKind::invalid_argument, "survival_1d: t must be nonnegative");
    require(interior(kind, x), ErrorKind::invalid_argument, "survival_1d: x must be interior");
    if (t == 0.0) return {1.0, 0.0, 0};
    const double c = eigenvalue(kind, 1);
    const double l = length(kind);
    auto term = [&](int k) {
        return 4.0 / (k * pi) * std::sin(k * pi * (x - left_end(kind)) / l) * std::exp(-eigenvalue(kind, k) * t);
    };
    // Envelope 4/(k pi) <= 4/pi; stride 2 only improves the bound.
    return detail::certified_sum(term, 4.0 / pi, 0, c, 0.0, t, 1, 2, "survival_1d");
}

/// Explicit intrinsic-ultracontractivity constants from |e_k| <= k |e_1|:
/// C(t) = 1 + S(t), c(t) = max(0, 1 - S(t)) with
/// S(t) = sum_{k>=2} k² exp(-(lambda_k - lambda_1) t), tail included.
struct UCBounds {
    double lower = 0.0;  // c(t)
    double upper = 0.0;  // C(t)
    double series = 0.0;
    int terms = 0;
    double tail_bound = 0.0;
};

inline UCBounds uc_bounds(IntervalKind kind, double t) {
    require(t > 0.0, ErrorKind::invalid_argument, "uc_bounds: t must be positive");
    const double c = eigenvalue(kind, 1);
    auto term = [&](int k) { return double(k) * k * std::exp(-c * (double(k) * k - 1.0) * t); };
    const SeriesValue s = detail::certified_sum(term, 1.0, 2, c, 1.0, t, 2, 1, "uc_bounds");
    UCBounds out;
    out.series = s.value + s.error_bound;
    out.terms = s.terms;
    out.tail_bound = s.error_bound;
    out.upper = 1.0 + out.series;
    out.lower = std::max(0.0, 1.0 - out.series);
    return out;
}

/// p_t(x,y) ∫phi² / (phi(x) phi(y) e^{-lambda_1 t}) from the series; the
/// quantity the constants sandwich.
inline double normalized_kernel_ratio(IntervalKind kind, double t, double x, double y) {
    const SeriesValue p = heat_kernel_1d(kind, t, x, y);
    const double lead = std::exp(-eigenvalue(kind, 1) * t) * eigenfunction(kind, 1, x) * eigenfunction(kind, 1, y);
    return p.value / lead;
}

/// Smallest integer K >= 1 such that, for every Brownian time v >= K/2,
///   (C(v)/c(v))² <= 1 + eps/beta(alpha)   on (0,1), and
///   (c(v)/C(v))² >= 1 - eps/gamma(alpha)  on (-1,1),
/// with c, C evaluated at heat time v/2. Both ratios are monotone in v, so
/// the first v on a 0.01 grid where both hold fixes K.
struct WaitingConstant {
    int K = 0;
    double threshold_time = 0.0;  // first grid v where both conditions hold
    double unit_ratio = 0.0;      // (C/c)² on (0,1) at v = K/2
    double sym_ratio = 0.0;       // (c/C)² on (-1,1) at v = K/2
};

inline WaitingConstant waiting_constant_detail(double alpha, double eps) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::invalid_argument,
            "waiting_constant: alpha must lie in (0,1)");
    const double b = beta(alpha), g = gamma(alpha);
    require(eps > 0.0 && eps < g, ErrorKind::invalid_argument,
            "waiting_constant: eps must satisfy 0 < eps < gamma(alpha)");
    auto ratios = [&](double v) {
        const UCBounds u = uc_bounds(IntervalKind::unit, v / 2.0);
        const UCBounds s = uc_bounds(IntervalKind::sym, v / 2.0);
        const double ru = u.lower > 0.0 ? std::pow(u.upper / u.lower, 2) : std::numeric_limits<double>::infinity();
        const double rs = std::pow(s.lower / s.upper, 2);
        return std::pair{ru, rs};
    };
    auto holds = [&](double v) {
        auto [ru, rs] = ratios(v);
        return ru <= 1.0 + eps / b && rs >= 1.0 - eps / g;
    };
    constexpr double step = 0.01;
    constexpr double v_max = 200.0;
    for (int i = 1; i * step <= v_max + 1e-9; ++i) {
        const double v = i * step;
        if (!holds(v)) continue;
        WaitingConstant out;
        out.threshold_time = v;
        out.K = std::max(1, static_cast<int>(std::ceil(2.0 * v - 1e-9)));
        auto [ru, rs] = ratios(out.K / 2.0);
        out.unit_ratio = ru;
        out.sym_ratio = rs;
        if (!(ru <= 1.0 + eps / b && rs >= 1.0 - eps / g))
            fail(ErrorKind::numerical, "waiting_constant: monotonicity check failed at K/2");
        return out;
    }
    fail(ErrorKind::numerical, "waiting_constant: conditions not met for v <= 200");
}

inline int waiting_constant(double alpha, double eps) { return waiting_constant_detail(alpha, eps).K; }

}  // namespace gapkit::interval
