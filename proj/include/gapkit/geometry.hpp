#pragma once

// Convex planar domains symmetric about both coordinate axes.
//
// A domain is stored through its top-height profile f on [0, a]; the other
// three quadrants follow by reflection, so double symmetry holds by
// construction. Domains are open: points with |y| = f(|x|) or |x| = a are
// outside.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gapkit/error.hpp"

namespace gapkit {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator-(Point p, Point q) { return {p.x - q.x, p.y - q.y}; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }

enum class DomainKind { rectangle, diamond, ellipse, stadium, superellipse, polygonal };

inline const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::rectangle: return "rectangle";
        case DomainKind::diamond: return "diamond";
        case DomainKind::ellipse: return "ellipse";
        case DomainKind::stadium: return "stadium";
        case DomainKind::superellipse: return "superellipse";
        case DomainKind::polygonal: return "polygonal";
    }
    return "unknown";
}

/// Which half of a domain: right = {x > 0}, top = {y > 0}.
enum class Half { right, top };

inline const char* to_string(Half h) { return h == Half::right ? "right" : "top"; }

class SymmetricConvexDomain {
public:
    static SymmetricConvexDomain rectangle(double a, double b) {
        check_extent(a, b);
        SymmetricConvexDomain d(DomainKind::rectangle, a, b);
        d.vertices_ = {{0.0, b}, {a, b}};
        return d;
    }

    static SymmetricConvexDomain diamond(double a, double b) {
        check_extent(a, b);
        SymmetricConvexDomain d(DomainKind::diamond, a, b);
        d.vertices_ = {{0.0, b}, {a, 0.0}};
        return d;
    }

    static SymmetricConvexDomain ellipse(double a, double b) {
        check_extent(a, b);
        return SymmetricConvexDomain(DomainKind::ellipse, a, b);
    }

    /// Rectangle with semicircular caps on its short sides; the caps sit on
    /// the left/right when a >= b and on the top/bottom otherwise.
    static SymmetricConvexDomain stadium(double a, double b) {
        check_extent(a, b);
        return SymmetricConvexDomain(DomainKind::stadium, a, b);
    }

    /// |x/a|^p + |y/b|^p < 1, convex for p >= 1.
    static SymmetricConvexDomain superellipse(double a, double b, double p) {
        check_extent(a, b);
        require(std::isfinite(p) && p >= 1.0, ErrorKind::invalid_argument,
                "superellipse exponent must be >= 1 for convexity");
        SymmetricConvexDomain d(DomainKind::superellipse, a, b);
        d.exponent_ = p;
        return d;
    }

    /// Piecewise-linear profile through vertices (x_0 = 0, y_0 = b), ...,
    /// (x_last = a, y_last >= 0) with x strictly increasing.
    static SymmetricConvexDomain polygonal(std::vector<Point> vertices) {
        require(vertices.size() >= 2, ErrorKind::invalid_argument,
                "polygonal profile needs at least two vertices");
        require(vertices.front().x == 0.0, ErrorKind::invalid_argument,
                "polygonal profile must start at x = 0");
        for (std::size_t i = 1; i < vertices.size(); ++i)
            require(vertices[i].x > vertices[i - 1].x, ErrorKind::invalid_argument,
                    "polygonal profile x-coordinates must be strictly increasing");
        for (const auto& v : vertices)
            require(std::isfinite(v.y) && v.y >= 0.0, ErrorKind::invalid_argument,
                    "polygonal profile heights must be nonnegative");
        const double a = vertices.back().x;
        const double b = vertices.front().y;
        check_extent(a, b);
        // Concavity: slopes nonincreasing, and nonpositive from the apex on.
        double prev_slope = 0.0;
        for (std::size_t i = 1; i < vertices.size(); ++i) {
            const double slope =
                (vertices[i].y - vertices[i - 1].y) / (vertices[i].x - vertices[i - 1].x);
            require(slope <= prev_slope + 1e-12, ErrorKind::invalid_argument,
                    "polygonal profile is not concave and nonincreasing at vertex " +
                        std::to_string(i - 1));
            prev_slope = slope;
        }
        SymmetricConvexDomain d(DomainKind::polygonal, a, b);
        d.vertices_ = std::move(vertices);
        return d;
    }

    DomainKind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double exponent() const { return exponent_; }

    /// Vertices of the first-quadrant profile for piecewise-linear kinds.
    const std::vector<Point>& vertices() const { return vertices_; }
    bool piecewise_linear() const { return !vertices_.empty(); }

    /// True for profiles identically equal to b.
    bool is_rectangle() const {
        if (kind_ == DomainKind::rectangle) return true;
        if (kind_ != DomainKind::polygonal) return false;
        return std::all_of(vertices_.begin(), vertices_.end(),
                           [&](const Point& v) { return v.y == b_; });
    }

    /// Top height f(|x|) for |x| <= a, 0 beyond.
    double height(double x) const {
        x = std::abs(x);
        if (x > a_) return 0.0;
        switch (kind_) {
            case DomainKind::ellipse: {
                const double r = x / a_;
                return b_ * std::sqrt(std::max(0.0, 1.0 - r * r));
            }
            case DomainKind::stadium: {
                if (a_ >= b_) {
                    const double flat = a_ - b_;
                    if (x <= flat) return b_;
                    const double dx = x - flat;
                    return std::sqrt(std::max(0.0, b_ * b_ - dx * dx));
                }
                return (b_ - a_) + std::sqrt(std::max(0.0, a_ * a_ - x * x));
            }
            case DomainKind::superellipse: {
                const double r = std::pow(x / a_, exponent_);
                return b_ * std::pow(std::max(0.0, 1.0 - r), 1.0 / exponent_);
            }
            default: return interpolate(x);
        }
    }

    bool contains(Point p) const {
        const double x = std::abs(p.x), y = std::abs(p.y);
        if (x >= a_ || y >= b_) return false;
        switch (kind_) {
            case DomainKind::rectangle: return true;
            case DomainKind::diamond: return x / a_ + y / b_ < 1.0;
            case DomainKind::ellipse: {
                const double u = x / a_, v = y / b_;
                return u * u + v * v < 1.0;
            }
            case DomainKind::stadium: {
                if (a_ >= b_) {
                    const double flat = a_ - b_;
                    if (x <= flat) return true;
                    const double dx = x - flat;
                    return dx * dx + y * y < b_ * b_;
                }
                const double flat = b_ - a_;
                if (y <= flat) return true;
                const double dy = y - flat;
                return x * x + dy * dy < a_ * a_;
            }
            case DomainKind::superellipse:
                return std::pow(x / a_, exponent_) + std::pow(y / b_, exponent_) < 1.0;
            case DomainKind::polygonal: return y < interpolate(x);
        }
        return false;
    }

    /// Membership in the closure.
    bool closure_contains(Point p, double tol = 1e-12) const {
        const double x = std::abs(p.x), y = std::abs(p.y);
        if (x > a_ + tol) return false;
        return y <= height(std::min(x, a_)) + tol;
    }

    /// Distance from the first-quadrant image of p to the first-quadrant
    /// boundary arc: the profile graph plus the vertical piece at x = a.
    double distance_to_boundary_arc(Point p) const {
        const Point q{std::abs(p.x), std::abs(p.y)};
        double best = std::numeric_limits<double>::infinity();
        if (piecewise_linear()) {
            for (std::size_t i = 1; i < vertices_.size(); ++i)
                best = std::min(best, segment_distance(q, vertices_[i - 1], vertices_[i]));
        } else {
            best = smooth_arc_distance(q);
        }
        const double fa = height(a_);
        if (fa > 0.0) best = std::min(best, segment_distance(q, {a_, 0.0}, {a_, fa}));
        return best;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"kind", to_string(kind_)}, {"a", a_}, {"b", b_}};
        nlohmann::json params = nlohmann::json::object();
        if (kind_ == DomainKind::superellipse) params["p"] = exponent_;
        if (kind_ == DomainKind::polygonal) {
            nlohmann::json verts = nlohmann::json::array();
            for (const auto& v : vertices_) verts.push_back({v.x, v.y});
            params["vertices"] = verts;
        }
        j["params"] = params;
        return j;
    }

    static SymmetricConvexDomain from_json(const nlohmann::json& j) {
        try {
            const std::string kind = j.at("kind").get<std::string>();
            const nlohmann::json params = j.value("params", nlohmann::json::object());
            if (kind == "polygonal" || kind == "polygonal-profile") {
                std::vector<Point> verts;
                for (const auto& v : params.at("vertices"))
                    verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
                auto d = polygonal(std::move(verts));
                if (j.contains("a"))
                    require(std::abs(j.at("a").get<double>() - d.a()) < 1e-12,
                            ErrorKind::invalid_argument, "polygonal: a must equal last vertex x");
                if (j.contains("b"))
                    require(std::abs(j.at("b").get<double>() - d.b()) < 1e-12,
                            ErrorKind::invalid_argument, "polygonal: b must equal first vertex y");
                return d;
            }
            const double a = j.at("a").get<double>();
            const double b = j.at("b").get<double>();
            if (kind == "rectangle") return rectangle(a, b);
            if (kind == "diamond") return diamond(a, b);
            if (kind == "ellipse") return ellipse(a, b);
            if (kind == "stadium") return stadium(a, b);
            if (kind == "superellipse") return superellipse(a, b, params.at("p").get<double>());
            fail(ErrorKind::invalid_argument, "unknown domain kind '" + kind + "'");
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::invalid_argument, std::string("malformed domain descriptor: ") + e.what());
        }
    }

private:
    SymmetricConvexDomain(DomainKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    static void check_extent(double a, double b) {
        require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0,
                ErrorKind::invalid_argument, "domain half-width and half-height must be positive");
    }

    double interpolate(double x) const {
        if (x >= vertices_.back().x) return vertices_.back().y;
        auto it = std::upper_bound(vertices_.begin(), vertices_.end(), x,
                                   [](double v, const Point& p) { return v < p.x; });
        const Point& hi = *it;
        const Point& lo = *(it - 1);
        return lo.y + (x - lo.x) * (hi.y - lo.y) / (hi.x - lo.x);
    }

    static double segment_distance(Point p, Point s0, Point s1) {
        const Point d = s1 - s0;
        const double len2 = d.x * d.x + d.y * d.y;
        double t = len2 > 0.0 ? ((p.x - s0.x) * d.x + (p.y - s0.y) * d.y) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return norm(p - Point{s0.x + t * d.x, s0.y + t * d.y});
    }

    // Dense sampling followed by golden-section refinement around the best
    // samples; tolerance 1e-10 in the curve parameter.
    double smooth_arc_distance(Point q) const {
        constexpr int samples = 2048;
        auto dist = [&](double x) { return norm(q - Point{x, height(x)}); };
        std::vector<double> vals(samples + 1);
        for (int i = 0; i <= samples; ++i) vals[i] = dist(a_ * i / samples);
        double best = *std::min_element(vals.begin(), vals.end());
        for (int i = 0; i <= samples; ++i) {
            const bool local = (i == 0 || vals[i] <= vals[i - 1]) && (i == samples || vals[i] <= vals[i + 1]);
            if (!local) continue;
            double lo = a_ * std::max(0, i - 1) / samples;
            double hi = a_ * std::min(samples, i + 1) / samples;
            constexpr double invphi = 0.6180339887498949;
            double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
            double f1 = dist(x1), f2 = dist(x2);
            while (hi - lo > 1e-10) {
                if (f1 < f2) {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - invphi * (hi - lo); f1 = dist(x1);
                } else {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + invphi * (hi - lo); f2 = dist(x2);
                }
            }
            best = std::min({best, f1, f2});
        }
        return best;
    }

    DomainKind kind_;
    double a_;
    double b_;
    double exponent_ = 2.0;
    std::vector<Point> vertices_;
};

/// Theta_{a,b} = {0 < x < a, -(b/a) x + b <= y < b}: the corner triangle
/// where every omitted first-quadrant point of a normalized domain lies.
struct CornerRegion {
    double a = 1.0;
    double b = 1.0;

    bool contains(Point p) const {
        return p.x > 0.0 && p.x < a && p.y >= -(b / a) * p.x + b && p.y < b;
    }
};

inline bool contains(const SymmetricConvexDomain& domain, Point p) { return domain.contains(p); }

inline bool contains(const SymmetricConvexDomain& domain, std::optional<Half> half, Point p) {
    if (half == Half::right && !(p.x > 0.0)) return false;
    if (half == Half::top && !(p.y > 0.0)) return false;
    return domain.contains(p);
}

inline bool theta_contains(const CornerRegion& region, Point p) { return region.contains(p); }

/// True when p lies in Theta_{a,b} but outside the closure of the domain.
/// Requires (a, 0) and (0, b) in the closure, i.e. the bounding rectangle is
/// already the smallest one containing the domain.
inline bool excluded_witness(const SymmetricConvexDomain& domain, Point p) {
    require(domain.closure_contains({domain.a(), 0.0}) && domain.closure_contains({0.0, domain.b()}),
            ErrorKind::precondition,
            "excluded_witness: (a,0) and (0,b) must lie in the closure of the domain");
    const CornerRegion theta{domain.a(), domain.b()};
    return theta.contains(p) && !domain.closure_contains(p, 0.0);
}

/// Euclidean distance from p to the boundary of the domain or of one of its
/// halves. Exact for piecewise-linear profiles.
inline double boundary_distance(const SymmetricConvexDomain& domain, Point p,
                                std::optional<Half> half = std::nullopt) {
    require(contains(domain, half, p), ErrorKind::precondition,
            "boundary_distance: point lies outside the region");
    double d = domain.distance_to_boundary_arc(p);
    if (half == Half::right) d = std::min(d, p.x);
    if (half == Half::top) d = std::min(d, p.y);
    return d;
}

}  // namespace gapkit
