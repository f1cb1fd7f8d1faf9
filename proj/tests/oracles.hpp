#pragma once

// Reference computations used only by the tests. Nothing here calls into
// the library; each oracle takes a different route to the same number.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

inline constexpr double pi = std::numbers::pi;
using Rational = boost::multiprecision::cpp_rational;

/// Adaptive Simpson with Richardson correction.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                      int depth = 50) {
    std::function<double(double, double, double, double, double, double, int, double)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d, double eps) {
            const double mid = (lo + hi) / 2, lm = (lo + mid) / 2, rm = (mid + hi) / 2;
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
            const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
            const double delta = left + right - whole;
            if (d <= 0 || std::abs(delta) <= 15 * eps) return left + right + delta / 15;
            return rec(lo, mid, flo, flm, fmid, left, d - 1, eps / 2) +
                   rec(mid, hi, fmid, frm, fhi, right, d - 1, eps / 2);
        };
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth, tol);
}

/// Gauss-Legendre nodes and weights on [a, b] by Newton on P_n.
inline void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1, p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = (a + b) / 2 - (b - a) / 2 * z;
        w[i] = (b - a) / ((1 - z * z) * dp * dp);
    }
}

/// Free-space Gaussian kernel of -Delta heat flow (variance 2t per axis),
/// reflected over the ends of (lo, hi) to impose Dirichlet conditions.
inline double image_kernel(double lo, double hi, double t, double x, double y, int images = 30) {
    const double L = hi - lo;
    auto g = [&](double d) { return std::exp(-d * d / (4 * t)) / std::sqrt(4 * pi * t); };
    double s = 0.0;
    for (int k = -images; k <= images; ++k) {
        const double shift = 2.0 * k * L;
        s += g(x - y + shift) - g(x + y - 2 * lo + shift);
    }
    return s;
}

/// Brute-force survival of the {-1,0,+1} walk: enumerate all 3^m paths.
inline Rational enumerate_survival(const std::vector<int>& lower, const std::vector<int>& upper, int i0) {
    const int m = static_cast<int>(upper.size()) - 1;
    std::int64_t paths = 1;
    for (int k = 0; k < m; ++k) paths *= 3;
    std::int64_t good = 0;
    for (std::int64_t code = 0; code < paths; ++code) {
        std::int64_t c = code;
        int x = i0;
        bool ok = x > lower[0] && x < upper[0];
        for (int k = 1; k <= m && ok; ++k) {
            x += static_cast<int>(c % 3) - 1;
            c /= 3;
            ok = x > lower[k] && x < upper[k];
        }
        good += ok;
    }
    return Rational(good) / Rational(paths);
}

/// Bisection root of f on [a, b] with f(a), f(b) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-15) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = (a + b) / 2, fm = f(m);
        if ((fm < 0) == (fa < 0)) a = m, fa = fm;
        else b = m;
    }
    return (a + b) / 2;
}

/// 5-point Dirichlet Laplacian on a boolean node mask (row-major nx by ny),
/// assembled directly as a dense matrix.
inline Eigen::MatrixXd mask_laplacian(const std::vector<std::vector<bool>>& mask, double h,
                                      std::vector<std::pair<int, int>>& nodes) {
    nodes.clear();
    const int nx = static_cast<int>(mask.size()), ny = static_cast<int>(mask[0].size());
    std::vector<std::vector<int>> id(nx, std::vector<int>(ny, -1));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (mask[i][j]) id[i][j] = static_cast<int>(nodes.size()), nodes.push_back({i, j});
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nodes.size(), nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        auto [i, j] = nodes[r];
        A(r, r) = 4.0 / (h * h);
        const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
        for (int q = 0; q < 4; ++q) {
            const int a = i + di[q], b = j + dj[q];
            if (a >= 0 && a < nx && b >= 0 && b < ny && id[a][b] >= 0) A(r, id[a][b]) = -1.0 / (h * h);
        }
    }
    return A;
}

/// Heat semigroup by the matrix exponential (Pade scaling and squaring),
/// independent of any eigendecomposition.
inline Eigen::MatrixXd expm_semigroup(const Eigen::MatrixXd& A, double t) { return (-t * A).exp(); }

/// 1-D lattice walk survival in the closed form of the discrete sine
/// transform: P(0 < R_k < N for k <= m) from i0.
inline double discrete_interval_survival(int N, int i0, int m) {
    double s = 0.0;
    for (int k = 1; k < N; ++k) {
        const double mu = (1.0 + 2.0 * std::cos(pi * k / N)) / 3.0;
        double mass = 0.0;
        for (int j = 1; j < N; ++j) mass += std::sin(pi * k * j / N);
        s += 2.0 / N * std::sin(pi * k * i0 / N) * mass * std::pow(mu, m);
    }
    return s;
}

}  // namespace oracle
