#pragma once

// Scaled lazy random walk with steps {-1, 0, +1} (probability 1/3 each) in
// each coordinate, spatial step 2^-n and theta_n = 3 * 2^(2n-1) steps per
// unit of Brownian time. Positions are kept as integer lattice coordinates
// and times as step counts; conversion to real units happens at the edges.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gapkit/error.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/parallel.hpp"
#include "gapkit/rng.hpp"
#include "gapkit/stats.hpp"

namespace gapkit::walk {

using Rational = boost::multiprecision::cpp_rational;

struct ScaledWalkParams {
    int n = 4;

    explicit ScaledWalkParams(int scale = 4) : n(scale) {
        require(n >= 1 && n <= 14, ErrorKind::invalid_argument, "walk scale n must lie in [1,14]");
    }

    std::int64_t theta() const { return std::int64_t{3} << (2 * n - 1); }
    double spacing() const { return std::ldexp(1.0, -n); }
    std::int64_t cells_per_unit() const { return std::int64_t{1} << n; }

    /// t * theta_n, which must be an integer.
    std::int64_t steps_for(double t) const {
        require(t >= 0.0, ErrorKind::invalid_argument, "time must be nonnegative");
        const double s = t * static_cast<double>(theta());
        const double r = std::round(s);
        require(std::abs(s - r) <= 1e-9 * std::max(1.0, s), ErrorKind::precondition,
                "time is not on the walk time lattice k / theta_n");
        return static_cast<std::int64_t>(r);
    }

    double time_of(std::int64_t steps) const { return static_cast<double>(steps) / static_cast<double>(theta()); }

    /// Exact lattice coordinate of x, or a precondition error.
    int lattice(double x, const char* what = "point") const {
        const double s = std::ldexp(x, n);
        const double r = std::round(s);
        require(std::abs(s - r) < 1e-9, ErrorKind::precondition,
                std::string(what) + " is not on the 2^-" + std::to_string(n) + " lattice");
        return static_cast<int>(r);
    }
};

/// Nearest multiple of 2^-n; a warning is appended when x moves.
inline double snap_to_lattice(double x, int n, std::vector<std::string>* warnings = nullptr,
                              const char* name = "value") {
    const double s = std::round(std::ldexp(x, n));
    const double y = std::ldexp(s, -n);
    if (y != x && warnings)
        warnings->push_back(std::string(name) + " snapped from " + std::to_string(x) + " to " + std::to_string(y) +
                            " on the 2^-" + std::to_string(n) + " lattice");
    return y;
}

/// Open region on the integer lattice (i, j) <-> (i 2^-n, j 2^-n).
class LatticeRegion {
public:
    static LatticeRegion whole_plane() {
        LatticeRegion r;
        r.kind_ = Kind::plane;
        return r;
    }

    /// Vertical strip lo < x < hi in lattice units, any y.
    static LatticeRegion strip(int lo, int hi) {
        require(hi - lo >= 2, ErrorKind::invalid_argument, "strip needs at least one interior column");
        LatticeRegion r;
        r.kind_ = Kind::strip;
        r.x_lo_ = lo, r.x_hi_ = hi;
        return r;
    }

    /// Open lattice rectangle x_lo < i < x_hi, y_lo < j < y_hi.
    static LatticeRegion rectangle(int x_lo, int x_hi, int y_lo, int y_hi) {
        return from_predicate(
            [=](int i, int j) { return i > x_lo && i < x_hi && j > y_lo && j < y_hi; },
            std::max(std::abs(x_lo), std::abs(x_hi)), std::max(std::abs(y_lo), std::abs(y_hi)));
    }

    /// Lattice points of a domain or of one of its halves.
    static LatticeRegion domain(const SymmetricConvexDomain& d, std::optional<Half> half, const ScaledWalkParams& p) {
        const double s = p.spacing();
        const int nx = static_cast<int>(std::ceil(d.a() / s)) + 1;
        const int ny = static_cast<int>(std::ceil(d.b() / s)) + 1;
        return from_predicate([&](int i, int j) { return gapkit::contains(d, half, Point{i * s, j * s}); }, nx, ny);
    }

    /// Mask over |i| <= nx, |j| <= ny; everything outside is outside.
    static LatticeRegion from_predicate(const std::function<bool(int, int)>& inside, int nx, int ny) {
        LatticeRegion r;
        r.kind_ = Kind::mask;
        r.nx_ = nx, r.ny_ = ny;
        r.mask_.assign(static_cast<std::size_t>(2 * nx + 1) * (2 * ny + 1), 0);
        for (int j = -ny; j <= ny; ++j)
            for (int i = -nx; i <= nx; ++i)
                if (inside(i, j)) r.mask_[r.slot(i, j)] = 1;
        return r;
    }

    bool contains(int i, int j) const {
        switch (kind_) {
            case Kind::plane: return true;
            case Kind::strip: return i > x_lo_ && i < x_hi_;
            case Kind::mask:
                if (i < -nx_ || i > nx_ || j < -ny_ || j > ny_) return false;
                return mask_[slot(i, j)] != 0;
        }
        return false;
    }

    bool bounded() const { return kind_ == Kind::mask; }

private:
    enum class Kind { plane, strip, mask };
    std::size_t slot(int i, int j) const {
        return static_cast<std::size_t>(j + ny_) * (2 * nx_ + 1) + static_cast<std::size_t>(i + nx_);
    }

    Kind kind_ = Kind::plane;
    int x_lo_ = 0, x_hi_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint8_t> mask_;
};

/// One step of both coordinates from a single 64-bit draw.
struct Step {
    int dx, dy;
};
inline Step draw_step(const CounterRng& rng, std::uint64_t k) {
    const std::uint64_t w = rng.word(k);
    return {CounterRng::trit(static_cast<std::uint32_t>(w)), CounterRng::trit(static_cast<std::uint32_t>(w >> 32))};
}

struct ExitResult {
    std::int64_t steps = 0;  // exit step, or the horizon when censored
    double time = 0.0;
    bool censored = false;
};

struct LatticePoint {
    int i = 0, j = 0;
};

inline LatticePoint lattice_start(const LatticeRegion& region, Point z0, const ScaledWalkParams& p) {
    const LatticePoint s{p.lattice(z0.x, "z0.x"), p.lattice(z0.y, "z0.y")};
    require(region.contains(s.i, s.j), ErrorKind::precondition, "z0 must lie inside the region");
    return s;
}

/// First step k >= 1 at which the walk is outside the region, or censored
/// at t_max. Replica r of a seed uses the stream (seed, r).
inline ExitResult simulate_exit(const LatticeRegion& region, Point z0, const ScaledWalkParams& p, double t_max,
                                std::uint64_t seed, std::uint64_t replica = 0) {
    const LatticePoint s = lattice_start(region, z0, p);
    const std::int64_t horizon = p.steps_for(t_max);
    const CounterRng rng(seed, replica);
    int i = s.i, j = s.j;
    for (std::int64_t k = 1; k <= horizon; ++k) {
        const Step st = draw_step(rng, static_cast<std::uint64_t>(k));
        i += st.dx, j += st.dy;
        if (!region.contains(i, j)) return {k, p.time_of(k), false};
    }
    return {horizon, p.time_of(horizon), true};
}

struct SurvivalEstimate {
    double estimate = 1.0;
    Interval ci{1.0, 1.0};
    std::uint64_t survivors = 0;
    std::uint64_t reps = 0;
};

/// P(tau > t) by Monte Carlo with a Wilson interval; survival means the
/// walk is inside at every step 1..t theta_n.
inline SurvivalEstimate survival_mc(const LatticeRegion& region, Point z0, const ScaledWalkParams& p, double t,
                                    std::uint64_t reps, std::uint64_t seed) {
    require(reps >= 1000, ErrorKind::precondition, "survival_mc: reps must be at least 1000");
    const LatticePoint s = lattice_start(region, z0, p);
    const std::int64_t horizon = p.steps_for(t);
    SurvivalEstimate out;
    out.reps = reps;
    if (horizon == 0) {
        out.survivors = reps;
        return out;
    }
    const unsigned workers = worker_count();
    std::vector<std::uint64_t> alive(workers + 1, 0);
    parallel_chunks(reps, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::uint64_t count = 0;
        for (std::size_t r = begin; r < end; ++r) {
            const CounterRng rng(seed, r);
            int i = s.i, j = s.j;
            bool inside = true;
            for (std::int64_t k = 1; k <= horizon; ++k) {
                const Step st = draw_step(rng, static_cast<std::uint64_t>(k));
                i += st.dx, j += st.dy;
                if (!region.contains(i, j)) {
                    inside = false;
                    break;
                }
            }
            count += inside;
        }
        alive[chunk] = count;
    });
    out.survivors = std::accumulate(alive.begin(), alive.end(), std::uint64_t{0});
    out.estimate = static_cast<double>(out.survivors) / static_cast<double>(reps);
    out.ci = wilson_interval(out.survivors, reps);
    return out;
}

// ---------------------------------------------------------------------------
// Survival-ratio experiments.

enum class RatioEstimator { direct, population };

inline const char* to_string(RatioEstimator e) { return e == RatioEstimator::direct ? "direct" : "population"; }

struct RatioRow {
    double t = 0.0;
    double survival[4] = {0, 0, 0, 0};  // D, D+, Gamma, Gamma+
    double double_ratio = 0.0;          // r_D / r_Gamma
    double log_double_ratio = 0.0;
    double log_se = 0.0;
    Interval ci;  // for the double ratio
    bool censored = false;
};

struct RatioTable {
    RatioEstimator estimator = RatioEstimator::population;
    int n = 0;
    std::uint64_t reps = 0;
    std::vector<RatioRow> rows;
};

struct RatioSetup {
    LatticeRegion regions[4];  // D, D+, Gamma, Gamma+
    LatticePoint start;
};

inline RatioSetup ratio_setup(const SymmetricConvexDomain& D, const SymmetricConvexDomain& G, Point z0,
                              const ScaledWalkParams& p) {
    require(contains(D, Half::right, z0), ErrorKind::precondition, "ratio_experiment: z0 must lie in D+");
    require(G.contains(z0), ErrorKind::precondition, "ratio_experiment: z0 must lie in Gamma");
    RatioSetup s{{LatticeRegion::domain(D, std::nullopt, p), LatticeRegion::domain(D, Half::right, p),
                  LatticeRegion::domain(G, std::nullopt, p), LatticeRegion::domain(G, Half::right, p)},
                 {p.lattice(z0.x, "z0.x"), p.lattice(z0.y, "z0.y")}};
    require(s.regions[1].contains(s.start.i, s.start.j), ErrorKind::precondition,
            "ratio_experiment: z0 must be a lattice point of D+");
    return s;
}

/// Minimum surviving paths (or particles per stage) before a cell is
/// reported; below it the cell is marked censored.
inline constexpr std::uint64_t censor_threshold = 10;

namespace detail {

inline void finish_row(RatioRow& row) {
    row.double_ratio = std::exp(row.log_double_ratio);
    const double hw = row.log_se;
    row.ci = {std::exp(row.log_double_ratio - hw), std::exp(row.log_double_ratio + hw)};
}

// All four exit times from one shared path per replica.
inline RatioTable ratio_direct(const RatioSetup& s, const ScaledWalkParams& p, const std::vector<double>& t_list,
                               std::uint64_t reps, std::uint64_t seed) {
    std::vector<std::int64_t> horizons;
    for (double t : t_list) horizons.push_back(p.steps_for(t));
    const std::int64_t horizon = *std::max_element(horizons.begin(), horizons.end());
    const std::size_t nt = t_list.size();
    const unsigned workers = worker_count();
    std::vector<std::vector<std::uint64_t>> counts(workers + 1, std::vector<std::uint64_t>(4 * nt, 0));
    parallel_chunks(reps, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& c = counts[chunk];
        for (std::size_t r = begin; r < end; ++r) {
            const CounterRng rng(seed, r);
            std::int64_t exit[4] = {horizon + 1, horizon + 1, horizon + 1, horizon + 1};
            int alive = 4;
            int i = s.start.i, j = s.start.j;
            for (std::int64_t k = 1; k <= horizon && alive > 0; ++k) {
                const Step st = draw_step(rng, static_cast<std::uint64_t>(k));
                i += st.dx, j += st.dy;
                for (int d = 0; d < 4; ++d)
                    if (exit[d] > horizon && !s.regions[d].contains(i, j)) exit[d] = k, --alive;
            }
            for (std::size_t q = 0; q < nt; ++q)
                for (int d = 0; d < 4; ++d) c[4 * q + d] += exit[d] > horizons[q];
        }
    });
    RatioTable tab;
    tab.estimator = RatioEstimator::direct;
    tab.n = p.n;
    tab.reps = reps;
    for (std::size_t q = 0; q < nt; ++q) {
        RatioRow row;
        row.t = t_list[q];
        std::uint64_t cnt[4] = {0, 0, 0, 0};
        for (auto& c : counts)
            for (int d = 0; d < 4; ++d) cnt[d] += c[4 * q + d];
        for (int d = 0; d < 4; ++d) row.survival[d] = static_cast<double>(cnt[d]) / static_cast<double>(reps);
        row.censored = std::any_of(cnt, cnt + 4, [](std::uint64_t c) { return c < censor_threshold; });
        if (!row.censored) {
            row.log_double_ratio = std::log(row.survival[1] / row.survival[0]) -
                                   std::log(row.survival[3] / row.survival[2]);
            // Nested events on a shared path: Var log(N_sub/N) ~ 1/N_sub - 1/N.
            const double var = (1.0 / cnt[1] - 1.0 / cnt[0]) + (1.0 / cnt[3] - 1.0 / cnt[2]);
            row.log_se = z95 * std::sqrt(std::max(0.0, var));
            finish_row(row);
        }
        tab.rows.push_back(row);
    }
    return tab;
}

// Fixed-size particle population with systematic resampling of survivors
// after every stage; survival is the product of per-stage surviving
// fractions. Returns log survival at each requested horizon (-inf when the
// population dies out).
inline std::vector<double> population_log_survival(const LatticeRegion& region, LatticePoint start,
                                                   std::int64_t stage, const std::vector<std::int64_t>& horizons,
                                                   std::uint64_t particles, std::uint64_t seed,
                                                   std::uint64_t stream, std::uint64_t* min_alive) {
    const std::int64_t horizon = *std::max_element(horizons.begin(), horizons.end());
    std::vector<int> xi(particles, start.i), yj(particles, start.j);
    std::vector<int> nx(particles), ny(particles);
    std::vector<double> out(horizons.size(), 0.0);
    std::vector<std::uint8_t> ok(particles);
    double log_s = 0.0;
    *min_alive = particles;
    const CounterRng resample_rng(seed, stream ^ 0xa5a5a5a5a5a5a5a5ULL);
    for (std::int64_t done = 0; done < horizon;) {
        const std::int64_t len = std::min(stage, horizon - done);
        std::uint64_t alive = 0;
        for (std::uint64_t q = 0; q < particles; ++q) {
            // stream is (domain/batch key, particle); counter is the global step.
            const CounterRng rng(seed, (stream << 32) ^ q);
            int i = xi[q], j = yj[q];
            bool inside = true;
            for (std::int64_t k = 1; k <= len; ++k) {
                const Step st = draw_step(rng, static_cast<std::uint64_t>(done + k));
                i += st.dx, j += st.dy;
                if (!region.contains(i, j)) {
                    inside = false;
                    break;
                }
            }
            xi[q] = i, yj[q] = j;
            ok[q] = inside;
            alive += inside;
        }
        done += len;
        *min_alive = std::min(*min_alive, alive);
        if (alive == 0) {
            for (std::size_t h = 0; h < horizons.size(); ++h)
                if (horizons[h] >= done) out[h] = -std::numeric_limits<double>::infinity();
            return out;
        }
        log_s += std::log(static_cast<double>(alive) / static_cast<double>(particles));
        for (std::size_t h = 0; h < horizons.size(); ++h)
            if (horizons[h] == done) out[h] = log_s;
        // Systematic resampling: particles positions drawn from survivors.
        std::vector<std::uint64_t> idx;
        idx.reserve(alive);
        for (std::uint64_t q = 0; q < particles; ++q)
            if (ok[q]) idx.push_back(q);
        const double u = resample_rng.uniform(static_cast<std::uint64_t>(done));
        for (std::uint64_t q = 0; q < particles; ++q) {
            const auto src = idx[static_cast<std::size_t>((q + u) * alive / particles)];
            nx[q] = xi[src], ny[q] = yj[src];
        }
        std::swap(xi, nx);
        std::swap(yj, ny);
    }
    return out;
}

inline RatioTable ratio_population(const RatioSetup& s, const ScaledWalkParams& p, const std::vector<double>& t_list,
                                   std::uint64_t reps, std::uint64_t seed, int batches) {
    require(batches >= 2, ErrorKind::invalid_argument, "population estimator needs at least 2 batches");
    std::vector<std::int64_t> horizons;
    for (double t : t_list) horizons.push_back(p.steps_for(t));
    std::int64_t stage = std::max<std::int64_t>(1, p.theta() / 32);
    for (auto h : horizons)
        if (h > 0) stage = std::gcd(stage, h);
    const std::uint64_t particles = std::max<std::uint64_t>(reps / batches, censor_threshold);
    const std::size_t nt = t_list.size();
    // logs[b][d][q]
    std::vector<std::vector<std::vector<double>>> logs(batches, std::vector<std::vector<double>>(4));
    std::vector<std::uint64_t> min_alive(static_cast<std::size_t>(batches) * 4, particles);
    parallel_chunks(static_cast<std::size_t>(batches) * 4, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t job = begin; job < end; ++job) {
            const std::size_t b = job / 4, d = job % 4;
            // Common random numbers: all four domains of a batch share the stream.
            logs[b][d] = population_log_survival(s.regions[d], s.start, stage, horizons, particles, seed, b + 1,
                                                 &min_alive[job]);
        }
    });
    RatioTable tab;
    tab.estimator = RatioEstimator::population;
    tab.n = p.n;
    tab.reps = particles * static_cast<std::uint64_t>(batches);
    const double tq = batches == 10 ? 2.262157162740992 : z95;  // Student t, 9 dof, for the default
    for (std::size_t q = 0; q < nt; ++q) {
        RatioRow row;
        row.t = t_list[q];
        std::vector<double> per_batch;
        bool dead = false;
        for (int d = 0; d < 4; ++d) {
            std::vector<double> v;
            for (int b = 0; b < batches; ++b) v.push_back(logs[b][d][q]);
            dead = dead || std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); });
            row.survival[d] = dead ? 0.0 : std::exp(mean(v));
        }
        const auto low = *std::min_element(min_alive.begin(), min_alive.end());
        row.censored = dead || low < censor_threshold;
        if (!row.censored) {
            for (int b = 0; b < batches; ++b)
                per_batch.push_back((logs[b][1][q] - logs[b][0][q]) - (logs[b][3][q] - logs[b][2][q]));
            row.log_double_ratio = mean(per_batch);
            row.log_se = tq * std::sqrt(sample_variance(per_batch) / batches);
            finish_row(row);
        }
        tab.rows.push_back(row);
    }
    return tab;
}

}  // namespace detail

/// r_D(t) / r_Gamma(t) with r_O(t) = P(tau_{O+} > t) / P(tau_O > t), from
/// common-seed simulations. The direct estimator follows one path per
/// replica through all four regions; the population estimator follows
/// reps/batches particles per region with resampling, which resolves
/// survival probabilities far below 1/reps.
inline RatioTable ratio_experiment(const SymmetricConvexDomain& D, const SymmetricConvexDomain& G, Point z0,
                                   const ScaledWalkParams& p, const std::vector<double>& t_list, std::uint64_t reps,
                                   std::uint64_t seed, RatioEstimator estimator = RatioEstimator::population,
                                   int batches = 10) {
    require(!t_list.empty(), ErrorKind::invalid_argument, "ratio_experiment: empty time list");
    require(reps >= 1000, ErrorKind::precondition, "ratio_experiment: reps must be at least 1000");
    const RatioSetup s = ratio_setup(D, G, z0, p);
    if (estimator == RatioEstimator::direct) return detail::ratio_direct(s, p, t_list, reps, seed);
    return detail::ratio_population(s, p, t_list, reps, seed, batches);
}

// ---------------------------------------------------------------------------
// Exact dynamic programming for the one-dimensional walk R_k.

enum class BoundaryMode { one_sided, two_sided };

/// P_{i0}(lower(k) < R_k < upper(k) for all k in [first, m]) by forward DP.
/// Bounds are open; lower = -upper for the two-sided mode.
template <class Scalar>
Scalar survival_between(const std::vector<int>& lower, const std::vector<int>& upper, int i0, int first = 0) {
    require(lower.size() == upper.size() && !upper.empty(), ErrorKind::invalid_argument,
            "survival_between: profiles must have equal nonempty length");
    const int m = static_cast<int>(upper.size()) - 1;
    const int lo = *std::min_element(lower.begin(), lower.end());
    const int hi = *std::max_element(upper.begin(), upper.end());
    require(i0 > lo && i0 < hi, ErrorKind::precondition, "survival_between: start outside every band");
    const int width = hi - lo + 1;
    std::vector<Scalar> cur(width, Scalar(0)), next(width, Scalar(0));
    auto inside = [&](int k, int x) { return k < first || (x > lower[k] && x < upper[k]); };
    if (!inside(0, i0)) return Scalar(0);
    cur[i0 - lo] = Scalar(1);
    const Scalar third = Scalar(1) / Scalar(3);
    for (int k = 1; k <= m; ++k) {
        std::fill(next.begin(), next.end(), Scalar(0));
        for (int x = lo + 1; x < hi; ++x) {
            const Scalar& v = cur[x - lo];
            if (v == Scalar(0)) continue;
            for (int dx = -1; dx <= 1; ++dx) {
                const int y = x + dx;
                if (y > lo && y < hi && inside(k, y)) next[y - lo] += v * third;
            }
        }
        std::swap(cur, next);
    }
    Scalar total(0);
    for (const auto& v : cur) total += v;
    return total;
}

inline void check_profile(const std::vector<int>& f) {
    require(!f.empty(), ErrorKind::invalid_argument, "profile must be nonempty");
    for (int v : f) require(v >= 2, ErrorKind::invalid_argument, "inconsistent profile: f(k) must be at least 2");
}

/// P_{i0}(0 < R_k < f(k), 0 <= k <= m) in the one-sided mode and
/// P_{i0}(|R_k| < f(k), 0 <= k <= m) in the two-sided mode, m = f.size()-1.
template <class Scalar = Rational>
Scalar exact_survival_dp(const std::vector<int>& f, BoundaryMode mode, int i0) {
    check_profile(f);
    if (mode == BoundaryMode::one_sided) {
        require(i0 > 0 && i0 < f[0], ErrorKind::precondition, "exact_survival_dp: need 0 < i0 < f(0)");
        return survival_between<Scalar>(std::vector<int>(f.size(), 0), f, i0);
    }
    require(std::abs(i0) < f[0], ErrorKind::precondition, "exact_survival_dp: need |i0| < f(0)");
    std::vector<int> lower(f.size());
    std::transform(f.begin(), f.end(), lower.begin(), [](int v) { return -v; });
    return survival_between<Scalar>(lower, f, i0);
}

/// Mass after every step, for inspection of the DP table.
template <class Scalar = Rational>
std::vector<Scalar> exact_survival_curve(const std::vector<int>& f, BoundaryMode mode, int i0) {
    std::vector<Scalar> out;
    for (std::size_t k = 1; k <= f.size(); ++k)
        out.push_back(exact_survival_dp<Scalar>(std::vector<int>(f.begin(), f.begin() + k), mode, i0));
    return out;
}

/// Two-dimensional walk with independent coordinates in an open lattice
/// rectangle (0, A) x (0, B): exact survival through step m.
inline Rational rectangle_survival_2d(int A, int B, int i0, int j0, int m) {
    require(A >= 2 && B >= 2 && i0 > 0 && i0 < A && j0 > 0 && j0 < B && m >= 0, ErrorKind::precondition,
            "rectangle_survival_2d: need a nonempty rectangle containing the start");
    std::vector<Rational> cur(static_cast<std::size_t>(A + 1) * (B + 1), Rational(0)), next = cur;
    auto at = [&](int i, int j) { return static_cast<std::size_t>(i) * (B + 1) + j; };
    cur[at(i0, j0)] = 1;
    const Rational ninth = Rational(1, 9);
    for (int k = 1; k <= m; ++k) {
        std::fill(next.begin(), next.end(), Rational(0));
        for (int i = 1; i < A; ++i)
            for (int j = 1; j < B; ++j) {
                const Rational& v = cur[at(i, j)];
                if (v == 0) continue;
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy) {
                        const int a = i + dx, b = j + dy;
                        if (a > 0 && a < A && b > 0 && b < B) next[at(a, b)] += v * ninth;
                    }
            }
        std::swap(cur, next);
    }
    Rational total = 0;
    for (const auto& v : cur) total += v;
    return total;
}

struct Lemma7Result {
    Rational f_one_sided, f_two_sided, g_one_sided, g_two_sided;
    Rational ratio_f, ratio_g;
    bool holds = false;
};

/// Compares P(0<R<f)/P(|R|<f) with P(0<R<g)/P(|R|<g), exactly.
inline Lemma7Result lemma7_check(const std::vector<int>& f, const std::vector<int>& g, int i0) {
    require(f.size() == g.size() && f.size() >= 2, ErrorKind::precondition,
            "lemma7_check: profiles must cover the same horizon m >= 1");
    check_profile(f);
    for (std::size_t k = 0; k < f.size(); ++k)
        require(f[k] <= g[k], ErrorKind::precondition, "lemma7_check: need f(k) <= g(k) for all k");
    require(i0 > 0 && i0 < f[0], ErrorKind::precondition, "lemma7_check: need 0 < i0 < f(0)");
    Lemma7Result r;
    r.f_one_sided = exact_survival_dp<Rational>(f, BoundaryMode::one_sided, i0);
    r.f_two_sided = exact_survival_dp<Rational>(f, BoundaryMode::two_sided, i0);
    r.g_one_sided = exact_survival_dp<Rational>(g, BoundaryMode::one_sided, i0);
    r.g_two_sided = exact_survival_dp<Rational>(g, BoundaryMode::two_sided, i0);
    require(r.f_one_sided > 0, ErrorKind::precondition,
            "lemma7_check: the walk from i0 cannot stay inside f; both probabilities vanish");
    r.ratio_f = r.f_one_sided / r.f_two_sided;
    r.ratio_g = r.g_one_sided / r.g_two_sided;
    r.holds = r.ratio_f <= r.ratio_g;
    return r;
}

/// Random profile pair 2 <= f(k) <= g(k) <= max_height, drawn from the
/// counter generator.
inline std::pair<std::vector<int>, std::vector<int>> random_profile_pair(int m, int max_height,
                                                                         const CounterRng& rng) {
    std::vector<int> f(m + 1), g(m + 1);
    std::uint64_t c = 0;
    for (int k = 0; k <= m; ++k) {
        const int span = max_height - 1;
        f[k] = 2 + static_cast<int>(rng.uniform(c++) * span);
        g[k] = f[k] + static_cast<int>(rng.uniform(c++) * (max_height - f[k] + 1));
    }
    return {f, g};
}

struct Lemma9Result {
    bool hypothesis_met = false;
    std::string message;
    long double pinched_one_sided = 0, pinched_two_sided = 0;
    long double full_one_sided = 0, full_two_sided = 0;
    long double pinched_ratio = 0, full_ratio = 0;
    long double bound = 0;  // d^lambda * full_ratio
    bool holds = false;      // pinched_ratio < bound
    bool pinch_monotone = false;  // pinched_ratio <= full_ratio
};

/// With hit times t_1 < ... < t_lambda (Brownian units) and horizon T, the
/// walk R on (0, 2^n) or (-2^n, 2^n) is pinched to |R| < u0 2^n at the hit
/// steps. Checks pinched ratio < d^lambda * unpinched ratio. The separation
/// hypothesis K < t_1, t_i - t_{i-1} >= K, t_lambda < T - K is checked
/// first; when it fails the result is reported, not raised.
inline Lemma9Result lemma9_style_check(double u0, const std::vector<double>& hits, double T, double x0,
                                       const ScaledWalkParams& p, double d, int K) {
    Lemma9Result r;
    const int width = static_cast<int>(p.cells_per_unit());
    const int U = p.lattice(u0, "u0");
    const int start = p.lattice(x0, "x0");
    require(U > 0 && U < width, ErrorKind::precondition, "lemma9_style_check: u0 must lie in (0,1)");
    require(start > 0 && start < width, ErrorKind::precondition, "lemma9_style_check: x0 must lie in (0,1)");
    const std::int64_t m = p.steps_for(T);
    require(m <= 2'000'000, ErrorKind::precondition, "lemma9_style_check: horizon too long for the DP");
    std::vector<std::int64_t> hit_steps;
    for (double t : hits) hit_steps.push_back(p.steps_for(t));
    r.hypothesis_met = true;
    double prev = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const bool ok = i == 0 ? hits[i] > K : hits[i] - prev >= K;
        if (!ok) r.hypothesis_met = false;
        prev = hits[i];
    }
    if (!hits.empty() && !(hits.back() < T - K)) r.hypothesis_met = false;
    if (!r.hypothesis_met) {
        r.message = "hypothesis unmet: need K < t_1, gaps >= K and t_last < T - K with K = " + std::to_string(K);
        return r;
    }
    std::vector<int> q(static_cast<std::size_t>(m) + 1, width);
    for (auto s : hit_steps) {
        require(s >= 1 && s <= m, ErrorKind::precondition, "lemma9_style_check: hit time outside (0, T]");
        q[static_cast<std::size_t>(s)] = U;
    }
    std::vector<int> zero(q.size(), 0), neg(q.size()), full(q.size(), width), negfull(q.size(), -width);
    std::transform(q.begin(), q.end(), neg.begin(), [](int v) { return -v; });
    using LD = long double;
    r.pinched_one_sided = survival_between<LD>(zero, q, start, 1);
    r.pinched_two_sided = survival_between<LD>(neg, q, start, 1);
    r.full_one_sided = survival_between<LD>(zero, full, start, 1);
    r.full_two_sided = survival_between<LD>(negfull, full, start, 1);
    r.pinched_ratio = r.pinched_one_sided / r.pinched_two_sided;
    r.full_ratio = r.full_one_sided / r.full_two_sided;
    r.bound = std::pow(static_cast<LD>(d), static_cast<LD>(hits.size())) * r.full_ratio;
    r.holds = hits.empty() ? r.pinched_ratio <= r.bound : r.pinched_ratio < r.bound;
    r.pinch_monotone = r.pinched_ratio <= r.full_ratio * (1 + 1e-15L);
    r.message = r.holds ? "inequality holds" : "inequality fails at this n";
    return r;
}

// ---------------------------------------------------------------------------
// Level crossings.

struct CrossingStats {
    int level = 0;             // lattice units
    std::int64_t separation = 0;  // steps
    std::vector<std::int64_t> times;
    std::size_t count() const { return times.size(); }
};

/// Greedy selection of indices k with y[k] == level, each at least
/// `separation` steps after the previously selected one.
inline CrossingStats crossing_count(const std::vector<int>& y, int level, std::int64_t separation) {
    require(separation >= 1, ErrorKind::invalid_argument, "crossing_count: separation must be positive");
    CrossingStats s;
    s.level = level;
    s.separation = separation;
    std::int64_t last = -separation;
    for (std::size_t k = 0; k < y.size(); ++k)
        if (y[k] == level && static_cast<std::int64_t>(k) - last >= separation) {
            s.times.push_back(static_cast<std::int64_t>(k));
            last = static_cast<std::int64_t>(k);
        }
    return s;
}

/// Real-valued variant: v0 is snapped to the 2^-n lattice and separation Q
/// is given in Brownian time.
inline CrossingStats crossing_count(const std::vector<int>& y, double v0, double Q, const ScaledWalkParams& p,
                                    std::vector<std::string>* warnings = nullptr) {
    const double snapped = snap_to_lattice(v0, p.n, warnings, "v0");
    return crossing_count(y, p.lattice(snapped, "v0"), std::max<std::int64_t>(1, p.steps_for(Q)));
}

/// y-coordinates of one walk path of the given length (lattice units).
inline std::vector<int> sample_path_y(int y0, std::int64_t steps, std::uint64_t seed, std::uint64_t replica = 0) {
    const CounterRng rng(seed, replica);
    std::vector<int> y(static_cast<std::size_t>(steps) + 1);
    y[0] = y0;
    for (std::int64_t k = 1; k <= steps; ++k) y[k] = y[k - 1] + draw_step(rng, static_cast<std::uint64_t>(k)).dy;
    return y;
}

}  // namespace gapkit::walk
