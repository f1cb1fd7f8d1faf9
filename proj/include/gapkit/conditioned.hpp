#pragma once

// Discretized Doob h-transform of Brownian motion killed outside a half
// domain: the chain with transition kernel p_tau(x,y) phi(y) / (e^{-lambda tau}
// phi(x)) built from the dense grid heat semigroup. Times are Brownian (heat
// time = Brownian time / 2).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gapkit/error.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/parallel.hpp"
#include "gapkit/rng.hpp"
#include "gapkit/spectral.hpp"
#include "gapkit/stats.hpp"

namespace gapkit::conditioned {

class ConditionedChain {
public:
    /// Window length delta split into J sub-steps; the window operator is
    /// the J-fold power of the sub-step kernel.
    ConditionedChain(const SymmetricConvexDomain& domain, Half half, double h, double delta = 1.0, int J = 8)
        : grid_(spectral::discretize(spectral::Region::half(domain, half), h)), delta_(delta), J_(J) {
        require(delta > 0.0, ErrorKind::invalid_argument, "conditioned chain: window length must be positive");
        require(J >= 1, ErrorKind::invalid_argument, "conditioned chain: J must be at least 1");
        require(grid_.size() <= 3000, ErrorKind::precondition,
                "conditioned chain: grid has " + std::to_string(grid_.size()) +
                    " nodes; the dense kernel is capped at 3000");
        const spectral::DenseSpectrum ds(grid_, 3000);
        lambda1_ = ds.values()(0);
        phi_ = ds.ground();
        require(phi_.minCoeff() > 0.0, ErrorKind::numerical, "conditioned chain: ground state is not positive");
        psi_ = phi_.array().square().matrix();
        psi_ /= psi_.sum();

        const double sub_heat = delta / (2.0 * J);
        const Eigen::MatrixXd K = ds.semigroup(sub_heat);
        step_ = K * phi_.asDiagonal();
        for (int r = 0; r < step_.rows(); ++r) {
            step_.row(r) = step_.row(r).cwiseMax(0.0);
            step_.row(r) /= step_.row(r).sum();
        }
        window_ = step_;
        for (int j = 1; j < J; ++j) window_ = (window_ * step_).eval();
        const int n = static_cast<int>(step_.rows());
        cdf_.resize(static_cast<std::size_t>(n) * n);
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            for (int c = 0; c < n; ++c) cdf_[static_cast<std::size_t>(r) * n + c] = acc += step_(r, c);
            cdf_[static_cast<std::size_t>(r) * n + n - 1] = 1.0;
        }
        psi_cdf_.resize(psi_.size());
        double acc = 0.0;
        for (int i = 0; i < psi_.size(); ++i) psi_cdf_[i] = acc += psi_(i);
        psi_cdf_.back() = 1.0;
    }

    const spectral::Grid& grid() const { return grid_; }
    double delta() const { return delta_; }
    int J() const { return J_; }
    double lambda1() const { return lambda1_; }
    const Eigen::VectorXd& phi() const { return phi_; }
    const Eigen::VectorXd& psi() const { return psi_; }
    const Eigen::MatrixXd& step() const { return step_; }
    const Eigen::MatrixXd& window() const { return window_; }

    int sample_psi(double u) const { return search(psi_cdf_.data(), static_cast<int>(psi_cdf_.size()), u); }
    int sample_step(int from, double u) const {
        const int n = grid_.size();
        return search(cdf_.data() + static_cast<std::size_t>(from) * n, n, u);
    }

    /// Node path of `steps` sub-steps from `start`.
    std::vector<int> path(int start, std::int64_t steps, std::uint64_t seed, std::uint64_t replica = 0) const {
        const CounterRng rng(seed, replica);
        std::vector<int> out(static_cast<std::size_t>(steps) + 1);
        out[0] = start;
        for (std::int64_t k = 1; k <= steps; ++k)
            out[k] = sample_step(out[k - 1], rng.uniform(static_cast<std::uint64_t>(k)));
        return out;
    }

private:
    // First index with cdf > u.
    static int search(const double* cdf, int n, double u) {
        return static_cast<int>(std::upper_bound(cdf, cdf + n - 1, u) - cdf);
    }

    spectral::Grid grid_;
    double delta_;
    int J_;
    double lambda1_ = 0.0;
    Eigen::VectorXd phi_, psi_;
    Eigen::MatrixXd step_, window_;
    std::vector<double> cdf_;  // row-major cumulative rows of step_
    std::vector<double> psi_cdf_;
};

inline ConditionedChain build_chain(const SymmetricConvexDomain& domain, Half half, double h, double delta = 1.0,
                                    int J = 8) {
    return ConditionedChain(domain, half, h, delta, J);
}

/// Start set y < v0 and target set y > v0 of the window event.
struct WindowSets {
    std::vector<std::uint8_t> below, above;
};

inline WindowSets window_sets(const ConditionedChain& c, double v0) {
    WindowSets w;
    const auto& g = c.grid();
    w.below.resize(g.size());
    w.above.resize(g.size());
    bool any_below = false, any_above = false;
    for (int i = 0; i < g.size(); ++i) {
        const double y = g.point(i).y;
        w.below[i] = y < v0;
        w.above[i] = y > v0;
        any_below = any_below || w.below[i];
        any_above = any_above || w.above[i];
    }
    require(any_below, ErrorKind::precondition, "window event: no grid node lies below v0");
    require(any_above, ErrorKind::precondition, "window event: no grid node lies above v0");
    return w;
}

/// P_psi(F0) from the window operator: sum over start nodes below v0 of
/// psi times the window mass above v0. On the chain every checkpoint is in
/// the half domain by construction, so only the endpoints matter.
inline double exact_C0(const ConditionedChain& c, double v0) {
    const WindowSets w = window_sets(c, v0);
    double total = 0.0;
    for (int x = 0; x < c.grid().size(); ++x) {
        if (!w.below[x]) continue;
        double mass = 0.0;
        for (int y = 0; y < c.grid().size(); ++y)
            if (w.above[y]) mass += c.window()(x, y);
        total += c.psi()(x) * mass;
    }
    return total;
}

struct C0Estimate {
    double estimate = 0.0;
    Interval ci;
    double exact = 0.0;  // chain value from the window operator
    std::uint64_t reps = 0;
};

inline C0Estimate estimate_C0(const ConditionedChain& c, double v0, std::uint64_t reps, std::uint64_t seed) {
    require(reps >= 1, ErrorKind::invalid_argument, "estimate_C0: reps must be positive");
    const WindowSets w = window_sets(c, v0);
    std::vector<std::uint64_t> hits(worker_count() + 1, 0);
    parallel_chunks(reps, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        std::uint64_t count = 0;
        for (std::size_t r = begin; r < end; ++r) {
            const CounterRng rng(seed, r);
            int x = c.sample_psi(rng.uniform(0));
            if (!w.below[x]) continue;
            for (int j = 1; j <= c.J(); ++j) x = c.sample_step(x, rng.uniform(static_cast<std::uint64_t>(j)));
            count += w.above[x];
        }
        hits[chunk] = count;
    });
    C0Estimate e;
    e.reps = reps;
    std::uint64_t total = 0;
    for (auto hcount : hits) total += hcount;
    e.estimate = static_cast<double>(total) / static_cast<double>(reps);
    e.ci = wilson_interval(total, reps);
    e.exact = exact_C0(c, v0);
    return e;
}

struct ErgodicReport {
    int m = 0;
    double C0 = 0.0;  // threshold reference
    std::vector<double> fractions;
    double mean = 0.0;
    double variance = 0.0;
    double p_above_08 = 0.0;
    double p_above_07 = 0.0;
};

/// Fraction of windows k < m with L_k below v0 and L_{k+1} above v0, for
/// paths started from psi. C0 defaults to the chain value exact_C0.
inline ErgodicReport ergodic_fraction(const ConditionedChain& c, double v0, int m, std::uint64_t reps,
                                      std::uint64_t seed, std::optional<double> C0 = std::nullopt) {
    require(m >= 1, ErrorKind::precondition, "ergodic_fraction: horizon m must be at least 1");
    require(reps >= 1, ErrorKind::invalid_argument, "ergodic_fraction: reps must be positive");
    const WindowSets w = window_sets(c, v0);
    ErgodicReport rep;
    rep.m = m;
    rep.C0 = C0 ? *C0 : exact_C0(c, v0);
    rep.fractions.assign(reps, 0.0);
    parallel_chunks(reps, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const CounterRng rng(seed, r);
            std::uint64_t counter = 0;
            int x = c.sample_psi(rng.uniform(counter++));
            int hitsum = 0;
            for (int k = 0; k < m; ++k) {
                const bool start_below = w.below[x];
                for (int j = 0; j < c.J(); ++j) x = c.sample_step(x, rng.uniform(counter++));
                hitsum += start_below && w.above[x];
            }
            rep.fractions[r] = static_cast<double>(hitsum) / m;
        }
    });
    rep.mean = gapkit::mean(rep.fractions);
    rep.variance = sample_variance(rep.fractions);
    std::uint64_t a8 = 0, a7 = 0;
    for (double f : rep.fractions) {
        a8 += f > 0.8 * rep.C0;
        a7 += f > 0.7 * rep.C0;
    }
    rep.p_above_08 = static_cast<double>(a8) / static_cast<double>(reps);
    rep.p_above_07 = static_cast<double>(a7) / static_cast<double>(reps);
    return rep;
}

struct BridgeRow {
    double t = 0.0;
    double max_tv = 0.0;
    int worst_start = 0;
};

/// For each t, the largest over starts x of the total-variation distance
/// between the time-t/2 law of the chain from x conditioned to survive to t,
/// a_x(z) ~ p_{t/2}(x,z) P_z(tau > t/2), and psi.
inline std::vector<BridgeRow> bridge_convergence(const SymmetricConvexDomain& domain, Half half, double h,
                                                 const std::vector<double>& t_list) {
    const spectral::Grid g = spectral::discretize(spectral::Region::half(domain, half), h);
    const spectral::DenseSpectrum ds(g, 3000);
    Eigen::VectorXd psi = ds.ground().array().square().matrix();
    psi /= psi.sum();
    std::vector<BridgeRow> rows;
    for (double t : t_list) {
        require(t > 0.0, ErrorKind::invalid_argument, "bridge_convergence: times must be positive");
        const double s_heat = t / 4.0;  // Brownian t/2
        const Eigen::MatrixXd K = ds.normalized_semigroup(s_heat);
        const Eigen::VectorXd survive = K * Eigen::VectorXd::Ones(g.size());
        BridgeRow row{t, 0.0, 0};
        for (int x = 0; x < g.size(); ++x) {
            Eigen::VectorXd a = K.row(x).transpose().cwiseProduct(survive).cwiseMax(0.0);
            a /= a.sum();
            const double tv = 0.5 * (a - psi).cwiseAbs().sum();
            if (tv > row.max_tv) row.max_tv = tv, row.worst_start = x;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gapkit::conditioned
