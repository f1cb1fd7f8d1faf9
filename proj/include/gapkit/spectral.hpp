#pragma once

// Five-point finite-difference Dirichlet Laplacian on lattice regions, its
// lowest eigenpairs, Richardson-extrapolated spectra, and heat-semigroup
// evaluation (Crank-Nicolson and dense spectral).
//
// Grid nodes sit at (i h, j h) for integers i, j, so axis-aligned half
// domains share nodes with their parent domain. Nodes outside the open
// region are Dirichlet zero; no boundary fitting is done.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "gapkit/error.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/rng.hpp"

namespace gapkit::spectral {

inline constexpr double pi = std::numbers::pi;

/// pi²/4 (m²/a² + n²/b²): Dirichlet eigenvalues of (-a,a) x (-b,b).
inline double rectangle_eigenvalue(double a, double b, int m, int n) {
    return pi * pi / 4.0 * (m * m / (a * a) + n * n / (b * b));
}

/// 3 pi² / (4 max(a,b)²).
inline double rectangle_gap(double a, double b) {
    const double m = std::max(a, b);
    return 3.0 * pi * pi / (4.0 * m * m);
}

/// A region the solver can mesh: a symmetric convex domain, one of its
/// halves, or the slit square (-1,1)² minus {(0,y) : |y| >= eps}.
class Region {
public:
    static Region full(SymmetricConvexDomain d) { return Region(DomainPart{std::move(d), std::nullopt}); }
    static Region half(SymmetricConvexDomain d, Half h) { return Region(DomainPart{std::move(d), h}); }
    static Region slit_square(double eps) {
        require(eps > 0.0 && eps <= 1.0, ErrorKind::invalid_argument, "slit_square: eps must lie in (0,1]");
        return Region(SlitSquare{eps});
    }

    bool contains(Point p) const {
        if (const auto* d = std::get_if<DomainPart>(&spec_)) return gapkit::contains(d->domain, d->half, p);
        const auto& s = std::get<SlitSquare>(spec_);
        if (!(std::abs(p.x) < 1.0 && std::abs(p.y) < 1.0)) return false;
        return !(p.x == 0.0 && std::abs(p.y) >= s.eps - 1e-12);
    }

    double half_width() const {
        if (const auto* d = std::get_if<DomainPart>(&spec_)) return d->domain.a();
        return 1.0;
    }
    double half_height() const {
        if (const auto* d = std::get_if<DomainPart>(&spec_)) return d->domain.b();
        return 1.0;
    }

    const SymmetricConvexDomain* domain() const {
        const auto* d = std::get_if<DomainPart>(&spec_);
        return d ? &d->domain : nullptr;
    }
    std::optional<Half> half_part() const {
        const auto* d = std::get_if<DomainPart>(&spec_);
        return d ? d->half : std::nullopt;
    }
    std::optional<double> slit_eps() const {
        const auto* s = std::get_if<SlitSquare>(&spec_);
        return s ? std::optional<double>(s->eps) : std::nullopt;
    }

    nlohmann::json to_json() const {
        if (const auto* d = std::get_if<DomainPart>(&spec_)) {
            nlohmann::json j{{"domain", d->domain.to_json()}};
            j["part"] = d->half ? to_string(*d->half) : "full";
            return j;
        }
        return {{"part", "slit-square"}, {"eps", std::get<SlitSquare>(spec_).eps}};
    }

private:
    struct DomainPart {
        SymmetricConvexDomain domain;
        std::optional<Half> half;
    };
    struct SlitSquare {
        double eps;
    };
    explicit Region(std::variant<DomainPart, SlitSquare> spec) : spec_(std::move(spec)) {}

    std::variant<DomainPart, SlitSquare> spec_;
};

/// Interior lattice nodes of a region at mesh width h.
class Grid {
public:
    Grid(const Region& region, double h) : h_(h) {
        require(h > 0.0 && std::isfinite(h), ErrorKind::invalid_argument, "discretize: h must be positive");
        nx_ = static_cast<int>(std::ceil(region.half_width() / h - 1e-9));
        ny_ = static_cast<int>(std::ceil(region.half_height() / h - 1e-9));
        index_.assign(static_cast<std::size_t>(2 * nx_ + 1) * (2 * ny_ + 1), -1);
        for (int j = -ny_; j <= ny_; ++j)
            for (int i = -nx_; i <= nx_; ++i)
                if (region.contains({i * h, j * h})) {
                    index_[slot(i, j)] = static_cast<int>(nodes_.size());
                    nodes_.push_back({i, j});
                }
        require(!nodes_.empty(), ErrorKind::precondition, "discretize: grid has no interior nodes");
    }

    double h() const { return h_; }
    double cell_area() const { return h_ * h_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    /// Node index of lattice point (i, j), or -1 if it is not interior.
    int node(int i, int j) const {
        if (i < -nx_ || i > nx_ || j < -ny_ || j > ny_) return -1;
        return index_[slot(i, j)];
    }

    std::pair<int, int> lattice(int node) const { return nodes_[node]; }
    Point point(int node) const { return {nodes_[node].first * h_, nodes_[node].second * h_}; }

    /// Node at p, which must be a lattice point of this grid.
    int node_at(Point p) const {
        const double fi = p.x / h_, fj = p.y / h_;
        const long i = std::lround(fi), j = std::lround(fj);
        require(std::abs(fi - i) < 1e-9 && std::abs(fj - j) < 1e-9, ErrorKind::precondition,
                "point is not a grid node");
        const int n = node(static_cast<int>(i), static_cast<int>(j));
        require(n >= 0, ErrorKind::precondition, "point is not an interior grid node");
        return n;
    }

private:
    std::size_t slot(int i, int j) const {
        return static_cast<std::size_t>(j + ny_) * (2 * nx_ + 1) + static_cast<std::size_t>(i + nx_);
    }

    double h_;
    int nx_ = 0, ny_ = 0;
    std::vector<int> index_;
    std::vector<std::pair<int, int>> nodes_;
};

inline Grid discretize(const Region& region, double h) { return Grid(region, h); }

/// -Delta_h with Dirichlet zero outside the mask.
inline Eigen::SparseMatrix<double> laplacian(const Grid& g) {
    const double s = 1.0 / (g.h() * g.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g.size()) * 5);
    for (int n = 0; n < g.size(); ++n) {
        const auto [i, j] = g.lattice(n);
        trip.emplace_back(n, n, 4.0 * s);
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const int m = g.node(i + di, j + dj);
            if (m >= 0) trip.emplace_back(n, m, -s);
        }
    }
    Eigen::SparseMatrix<double> A(g.size(), g.size());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

inline Eigen::MatrixXd dense_laplacian(const Grid& g) { return Eigen::MatrixXd(laplacian(g)); }

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;  // sum v² h² = 1
    double residual = 0.0;   // ||A v - value v|| / ||v||
};

struct EigenOptions {
    int max_iterations = 2000;
    double tolerance = 1e-9;  // relative residual per eigenvalue
    int guard_vectors = 6;
    int dense_threshold = 600;  // grids this small are solved densely
};

/// The k smallest eigenpairs of -Delta_h, ascending. Shift-invert subspace
/// iteration (shift 0, sparse Cholesky) with Rayleigh-Ritz, which handles
/// repeated eigenvalues; tiny grids go to a dense solver.
inline std::vector<EigenPair> eigenpairs(const Grid& g, int k, const EigenOptions& opt = {}) {
    const int n = g.size();
    require(k >= 1 && k <= n, ErrorKind::precondition, "eigenpairs: need 1 <= k <= node count");
    const Eigen::SparseMatrix<double> A = laplacian(g);
    std::vector<EigenPair> out;
    auto finish = [&](const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
        for (int i = 0; i < k; ++i) {
            EigenPair p;
            p.value = values(i);
            Eigen::VectorXd v = vectors.col(i);
            p.residual = (A * v - p.value * v).norm() / v.norm();
            v /= std::sqrt(v.squaredNorm() * g.cell_area());
            if (v.sum() < 0.0) v = -v;
            p.vector = std::move(v);
            out.push_back(std::move(p));
        }
    };

    if (n <= opt.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A)};
        require(es.info() == Eigen::Success, ErrorKind::convergence, "eigenpairs: dense solver failed");
        finish(es.eigenvalues(), es.eigenvectors());
        return out;
    }

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(A);
    require(chol.info() == Eigen::Success, ErrorKind::numerical, "eigenpairs: Cholesky factorization failed");

    const int p = std::min(n, k + opt.guard_vectors);
    Eigen::MatrixXd X(n, p);
    const CounterRng rng(0x5eed, static_cast<std::uint64_t>(n));
    for (int c = 0; c < p; ++c)
        for (int r = 0; r < n; ++r)
            X(r, c) = c == 0 ? 1.0 : rng.uniform(static_cast<std::uint64_t>(c) * n + r) - 0.5;

    Eigen::VectorXd theta;
    double worst = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        Eigen::MatrixXd Y = chol.solve(X);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        Eigen::MatrixXd AQ = A * Q;
        Eigen::MatrixXd H = Q.transpose() * AQ;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        theta = es.eigenvalues();
        X = Q * es.eigenvectors();
        Eigen::MatrixXd AX = AQ * es.eigenvectors();
        worst = 0.0;
        for (int i = 0; i < k; ++i) {
            const double r = (AX.col(i) - theta(i) * X.col(i)).norm() / X.col(i).norm();
            worst = std::max(worst, r / theta(i));
        }
        if (worst <= opt.tolerance) {
            finish(theta, X);
            return out;
        }
    }
    fail(ErrorKind::convergence, "eigenpairs: no convergence after " + std::to_string(opt.max_iterations) +
                                     " iterations, worst relative residual " + std::to_string(worst));
}

/// Richardson extrapolation from three mesh levels 2h, h, h/2. The observed
/// order is clamped to [1, 2]; when the three values are not monotonically
/// converging no extrapolation is done and the error estimate is the full
/// spread of the two finest levels.
struct Extrapolation {
    double value = 0.0;
    double err_est = 0.0;
    std::optional<double> observed_order;
    bool extrapolated = false;
};

inline Extrapolation richardson(double coarse, double mid, double fine) {
    Extrapolation e;
    const double d1 = mid - coarse, d2 = fine - mid;
    if (d2 == 0.0) {
        e.value = fine;
        e.err_est = std::abs(d1) * 1e-3;
        e.extrapolated = false;
        return e;
    }
    if (d1 * d2 > 0.0 && std::abs(d2) < std::abs(d1)) {
        const double observed = std::log2(d1 / d2);
        e.observed_order = observed;
        const double p = std::clamp(observed, 1.0, 2.0);
        const double correction = d2 / (std::pow(2.0, p) - 1.0);
        e.value = fine + correction;
        e.err_est = std::abs(correction);
        e.extrapolated = true;
        return e;
    }
    e.value = fine;
    e.err_est = std::max(std::abs(d1), std::abs(d2));
    return e;
}

struct LevelValues {
    double h = 0.0;
    int nodes = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

struct SpectrumResult {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gap = 0.0;
    Extrapolation lambda1_fit;
    Extrapolation lambda2_fit;
    double err_est = 0.0;  // bound for gap: sum of the two eigenvalue estimates
    Eigen::VectorXd phi1;  // finest level, discrete integral sum phi h² = 1, phi >= 0
    std::optional<Grid> grid;
    std::vector<LevelValues> levels;
};

struct SpectrumOptions {
    int k = 2;  // 1 when only lambda1 is wanted (half domains)
    EigenOptions eigen;
    bool check_mesh = true;
};

inline void check_mesh_width(const Region& r, double h) {
    require(h <= std::min(r.half_width(), r.half_height()) / 8.0 + 1e-15, ErrorKind::precondition,
            "mesh width must satisfy h <= min(a,b)/8");
}

/// Eigenvalues at 2h, h and h/2, extrapolated; phi1 from the h/2 level.
inline SpectrumResult spectrum(const Region& region, double h, const SpectrumOptions& opt = {}) {
    if (opt.check_mesh) check_mesh_width(region, h);
    SpectrumResult res;
    for (double hl : {2.0 * h, h, h / 2.0}) {
        Grid g = discretize(region, hl);
        const int k = std::min(opt.k, g.size());
        auto pairs = eigenpairs(g, k, opt.eigen);
        LevelValues lv{hl, g.size(), pairs[0].value, k > 1 ? pairs[1].value : 0.0};
        res.levels.push_back(lv);
        if (hl == h / 2.0) {
            res.phi1 = pairs[0].vector / (pairs[0].vector.sum() * hl * hl);
            res.grid.emplace(std::move(g));
        }
    }
    const auto& L = res.levels;
    res.lambda1_fit = richardson(L[0].lambda1, L[1].lambda1, L[2].lambda1);
    res.lambda1 = res.lambda1_fit.value;
    if (opt.k > 1) {
        res.lambda2_fit = richardson(L[0].lambda2, L[1].lambda2, L[2].lambda2);
        res.lambda2 = res.lambda2_fit.value;
        res.gap = res.lambda2 - res.lambda1;
        res.err_est = res.lambda1_fit.err_est + res.lambda2_fit.err_est;
    } else {
        res.err_est = res.lambda1_fit.err_est;
    }
    return res;
}

enum class GapStatus { strict, rectangle_equality, inconclusive, violated };

inline const char* to_string(GapStatus s) {
    switch (s) {
        case GapStatus::strict: return "strict";
        case GapStatus::rectangle_equality: return "rectangle-equality";
        case GapStatus::inconclusive: return "inconclusive";
        case GapStatus::violated: return "violated";
    }
    return "unknown";
}

/// Domain gap against the bounding-rectangle gap. A strict inequality is
/// claimed only when the margin exceeds twice the error estimate.
struct GapComparison {
    double domain_gap = 0.0;
    double rectangle_gap = 0.0;
    double margin = 0.0;
    double err_est = 0.0;
    GapStatus status = GapStatus::inconclusive;
    SpectrumResult spectrum;
};

inline void check_normalized(const SymmetricConvexDomain& d) {
    require(d.closure_contains({d.a(), 0.0}) && d.closure_contains({0.0, d.b()}), ErrorKind::precondition,
            "(a,0) and (0,b) must lie in the closure of the domain");
}

inline GapComparison gap_report(const SymmetricConvexDomain& domain, double h, const SpectrumOptions& opt = {}) {
    check_normalized(domain);
    GapComparison gc;
    gc.spectrum = spectrum(Region::full(domain), h, opt);
    gc.domain_gap = gc.spectrum.gap;
    gc.rectangle_gap = rectangle_gap(domain.a(), domain.b());
    gc.margin = gc.domain_gap - gc.rectangle_gap;
    gc.err_est = gc.spectrum.err_est;
    if (gc.margin > 2.0 * gc.err_est)
        gc.status = GapStatus::strict;
    else if (gc.margin < -2.0 * gc.err_est)
        gc.status = GapStatus::violated;
    else if (domain.is_rectangle())
        gc.status = GapStatus::rectangle_equality;
    else
        gc.status = GapStatus::inconclusive;
    return gc;
}

/// lambda2(D) against min(lambda1(D+), lambda1(D^T)).
struct PayneResult {
    double lambda2 = 0.0;
    double lambda1_right = 0.0;
    double lambda1_top = 0.0;
    double residual = 0.0;
    double err_est = 0.0;  // combined estimate of the three values
    bool within_error = false;
};

inline PayneResult payne_check(const SymmetricConvexDomain& domain, double h, const SpectrumOptions& opt = {}) {
    check_normalized(domain);
    const SpectrumResult full = spectrum(Region::full(domain), h, opt);
    SpectrumOptions half_opt = opt;
    half_opt.k = 1;
    half_opt.check_mesh = false;
    check_mesh_width(Region::full(domain), h);
    const SpectrumResult right = spectrum(Region::half(domain, Half::right), h, half_opt);
    const SpectrumResult top = spectrum(Region::half(domain, Half::top), h, half_opt);
    PayneResult pr;
    pr.lambda2 = full.lambda2;
    pr.lambda1_right = right.lambda1;
    pr.lambda1_top = top.lambda1;
    const bool right_min = right.lambda1 <= top.lambda1;
    const double half_min = right_min ? right.lambda1 : top.lambda1;
    pr.residual = std::abs(full.lambda2 - half_min);
    pr.err_est = full.lambda2_fit.err_est + (right_min ? right.err_est : top.err_est);
    pr.within_error = pr.residual <= pr.err_est;
    return pr;
}

/// Gap of the slit square; the slit is the node column x = 0, |y| >= eps.
inline SpectrumResult slit_square_gap(double eps, double h, const SpectrumOptions& opt = {}) {
    require(eps > 0.0 && eps <= 1.0, ErrorKind::invalid_argument, "slit_square_gap: eps must lie in (0,1]");
    for (double hl : {2.0 * h, h, h / 2.0}) {
        const double r = eps / hl;
        require(std::abs(r - std::round(r)) < 1e-9 && std::round(r) >= 2.0, ErrorKind::precondition,
                "slit_square_gap: every mesh level must resolve eps with at least 2 nodes");
    }
    SpectrumOptions o = opt;
    o.k = 2;
    return spectrum(Region::slit_square(eps), h, o);
}

/// Crank-Nicolson evolution of the survival function u(t, .) = P.(tau > t)
/// under the heat semigroup e^{t Delta_h}, started from the indicator.
/// Time step tau <= h²/2; the first step is replaced by two backward-Euler
/// half steps (Rannacher start) to damp the nonsmooth initial data.
class SurvivalEvolver {
public:
    SurvivalEvolver(const Grid& g, double max_step = -1.0) : grid_(g), A_(laplacian(g)) {
        max_step_ = max_step > 0.0 ? max_step : g.h() * g.h() / 2.0;
    }

    /// Values u(t, z0) at each requested (nondecreasing) time.
    std::vector<double> at(Point z0, const std::vector<double>& times) {
        const int node = grid_.node_at(z0);
        std::vector<double> out;
        Eigen::VectorXd u = Eigen::VectorXd::Ones(grid_.size());
        double now = 0.0;
        double mass = u.sum();
        for (double t : times) {
            require(t >= now, ErrorKind::invalid_argument, "survival times must be nondecreasing");
            const double span = t - now;
            if (span > 0.0) {
                const int steps = std::max(1, static_cast<int>(std::ceil(span / max_step_ - 1e-12)));
                const double tau = span / steps;
                factor(tau);
                for (int s = 0; s < steps; ++s) {
                    if (!started_) {
                        for (int q = 0; q < 2; ++q) u = solver_.solve(u);  // two Euler steps of tau/2
                        started_ = true;
                    } else {
                        Eigen::VectorXd rhs = u - 0.5 * tau * (A_ * u);
                        u = solver_.solve(rhs);
                    }
                    const double m = u.sum();
                    if (m > mass * (1.0 + 1e-10))
                        fail(ErrorKind::numerical, "survival_grid: mass increased, scheme unstable");
                    mass = m;
                }
                now = t;
            }
            out.push_back(u(node));
        }
        return out;
    }

private:
    void factor(double tau) {
        if (tau == factored_tau_) return;
        Eigen::SparseMatrix<double> I(grid_.size(), grid_.size());
        I.setIdentity();
        Eigen::SparseMatrix<double> M = I + 0.5 * tau * A_;
        solver_.compute(M);
        require(solver_.info() == Eigen::Success, ErrorKind::numerical, "survival_grid: factorization failed");
        factored_tau_ = tau;
    }

    const Grid& grid_;
    Eigen::SparseMatrix<double> A_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    double max_step_;
    double factored_tau_ = -1.0;
    bool started_ = false;
};

/// P_{z0}(tau > t) at heat time t.
inline double survival_grid(const Grid& g, Point z0, double t) {
    require(t >= 0.0, ErrorKind::invalid_argument, "survival_grid: t must be nonnegative");
    SurvivalEvolver ev(g);
    return ev.at(z0, {t}).front();
}

/// Expected exit time in heat time, integral of the survival function:
/// (A^{-1} 1)(z0). Brownian exit times are twice this.
inline double mean_exit_grid(const Grid& g, Point z0) {
    const int node = g.node_at(z0);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(laplacian(g));
    require(solver.info() == Eigen::Success, ErrorKind::numerical, "mean_exit_grid: factorization failed");
    const Eigen::VectorXd u = solver.solve(Eigen::VectorXd::Ones(g.size()));
    return u(node);
}

/// Full eigendecomposition of -Delta_h for dense heat-kernel work.
class DenseSpectrum {
public:
    explicit DenseSpectrum(const Grid& g, int max_nodes = 3000) : h_(g.h()) {
        require(g.size() <= max_nodes, ErrorKind::precondition,
                "dense heat kernel: grid has " + std::to_string(g.size()) + " nodes, cap is " +
                    std::to_string(max_nodes));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g));
        require(es.info() == Eigen::Success, ErrorKind::numerical, "dense eigensolver failed");
        values_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        if (vectors_.col(0).sum() < 0.0) vectors_.col(0) *= -1.0;
    }

    const Eigen::VectorXd& values() const { return values_; }
    const Eigen::MatrixXd& vectors() const { return vectors_; }

    /// Ground state in the Euclidean normalization sum v² = 1.
    Eigen::VectorXd ground() const { return vectors_.col(0); }

    /// The operator e^{-t A} as a matrix (row x, column y). Kernel density
    /// values p_t(x, y) are these entries divided by h².
    Eigen::MatrixXd semigroup(double t) const {
        const Eigen::VectorXd e = (-t * values_.array()).exp().matrix();
        return vectors_ * e.asDiagonal() * vectors_.transpose();
    }

    /// exp(lambda1 t) e^{-tA}: the semigroup with the ground decay removed.
    Eigen::MatrixXd normalized_semigroup(double t) const {
        const Eigen::VectorXd e = (-t * (values_.array() - values_(0))).exp().matrix();
        return vectors_ * e.asDiagonal() * vectors_.transpose();
    }

private:
    double h_;
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
};

/// Extremes over node pairs of p_t(x,y) ∫phi² / (phi(x) phi(y) e^{-lambda1 t}).
struct SandwichRow {
    double t = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    bool min_nondecreasing = true;
    bool max_nonincreasing = true;
};

inline SandwichReport iu_sandwich_check(const Grid& g, const std::vector<double>& t_list) {
    const DenseSpectrum ds(g, 2000);
    const Eigen::VectorXd v = ds.ground();
    const Eigen::VectorXd inv = v.cwiseInverse();
    SandwichReport rep;
    for (double t : t_list) {
        Eigen::MatrixXd R = inv.asDiagonal() * ds.normalized_semigroup(t) * inv.asDiagonal();
        rep.rows.push_back({t, R.minCoeff(), R.maxCoeff()});
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (rep.rows[i].min_ratio < rep.rows[i - 1].min_ratio - 1e-12) rep.min_nondecreasing = false;
        if (rep.rows[i].max_ratio > rep.rows[i - 1].max_ratio + 1e-12) rep.max_nonincreasing = false;
    }
    return rep;
}

}  // namespace gapkit::spectral
