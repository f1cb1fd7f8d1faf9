#pragma once

// Result records, config hashing and the derived CSV/SVG views.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapkit/error.hpp"

namespace gapkit::report {

using nlohmann::json;

inline constexpr int schema_version = 1;

/// What an experiment exercises. Every record carries exactly one.
enum class Anchor {
    dirichlet_spectrum,
    gap_inequality,
    nodal_line_halves,
    slit_counterexample,
    half_domain_ratio,
    walk_continuum_limit,
    ratio_monotonicity_dp,
    pinched_ratio_contraction,
    product_independence,
    conditioned_process,
    ultracontractivity,
    explicit_gap_bound,
    acceptance_summary,
};

inline constexpr Anchor all_anchors[] = {
    Anchor::dirichlet_spectrum,   Anchor::gap_inequality,       Anchor::nodal_line_halves,
    Anchor::slit_counterexample,     Anchor::half_domain_ratio,    Anchor::walk_continuum_limit,
    Anchor::ratio_monotonicity_dp,   Anchor::pinched_ratio_contraction, Anchor::product_independence,
    Anchor::conditioned_process,     Anchor::ultracontractivity,   Anchor::explicit_gap_bound,
    Anchor::acceptance_summary,
};

inline const char* to_string(Anchor a) {
    switch (a) {
        case Anchor::dirichlet_spectrum: return "dirichlet-spectrum";
        case Anchor::gap_inequality: return "gap-inequality";
        case Anchor::nodal_line_halves: return "nodal-line-halves";
        case Anchor::slit_counterexample: return "slit-counterexample";
        case Anchor::half_domain_ratio: return "half-domain-ratio";
        case Anchor::walk_continuum_limit: return "walk-continuum-limit";
        case Anchor::ratio_monotonicity_dp: return "ratio-monotonicity-dp";
        case Anchor::pinched_ratio_contraction: return "pinched-ratio-contraction";
        case Anchor::product_independence: return "product-independence";
        case Anchor::conditioned_process: return "conditioned-process";
        case Anchor::ultracontractivity: return "ultracontractivity";
        case Anchor::explicit_gap_bound: return "explicit-gap-bound";
        case Anchor::acceptance_summary: return "acceptance-summary";
    }
    return "unknown";
}

inline bool is_anchor(const std::string& s) {
    return std::any_of(std::begin(all_anchors), std::end(all_anchors),
                       [&](Anchor a) { return s == to_string(a); });
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Hash of the canonical (key-sorted, compact) serialization.
inline std::string config_hash(const json& config) { return hex64(fnv1a(config.dump())); }

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ResultRecord {
    std::string experiment;
    Anchor anchor = Anchor::acceptance_summary;
    json config = json::object();
    json payload = json::object();
    std::string status = "ok";
    std::vector<std::string> warnings;
    std::string timestamp = utc_timestamp();

    std::string hash() const { return config_hash(config); }
    std::string id() const { return experiment + "-" + hash().substr(0, 12); }

    json to_json() const {
        return {{"schema_version", schema_version},
                {"id", id()},
                {"experiment", experiment},
                {"timestamp", timestamp},
                {"config", config},
                {"config_hash", hash()},
                {"anchor", to_string(anchor)},
                {"status", status},
                {"warnings", warnings},
                {"payload", payload}};
    }
};

/// Minimal CSV writer; fields containing separators are quoted.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row(std::move(header)); }

    void row(const std::vector<std::string>& fields) {
        require(fields.size() == cols_, ErrorKind::invalid_argument, "csv: row width does not match header");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            const auto& f = fields[i];
            if (f.find_first_of(",\"\n") != std::string::npos) {
                out_ << '"';
                for (char c : f) out_ << (c == '"' ? "\"\"" : std::string(1, c));
                out_ << '"';
            } else {
                out_ << f;
            }
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::size_t cols_;
    std::ostringstream out_;
};

inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    require(bool(f), ErrorKind::io, "cannot open " + path.string() + " for writing");
    f << text;
    require(bool(f), ErrorKind::io, "write to " + path.string() + " failed");
}

namespace detail {
inline std::string colour(double u) {
    u = std::clamp(u, 0.0, 1.0);
    // dark blue -> teal -> yellow
    const double r = std::clamp(1.6 * u - 0.5, 0.0, 1.0), g = std::clamp(0.15 + 0.85 * u, 0.0, 1.0),
                 b = std::clamp(0.55 - 0.45 * u, 0.0, 1.0);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(255 * r), int(255 * g), int(255 * b));
    return buf;
}
}  // namespace detail

/// Square cells at lattice points (x, y) with spacing h, coloured by value.
inline std::string svg_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& values, double h, const std::string& title) {
    require(xs.size() == ys.size() && xs.size() == values.size() && !xs.empty(), ErrorKind::invalid_argument,
            "svg_heatmap: inconsistent inputs");
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
    const double scale = 480.0 / std::max(*xmax - *xmin + h, *ymax - *ymin + h);
    const double W = (*xmax - *xmin + h) * scale, H = (*ymax - *ymin + h) * scale;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 20 << "\" height=\"" << H + 40 << "\">\n";
    s << "<text x=\"10\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    const double span = *vmax - *vmin > 0 ? *vmax - *vmin : 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = 10 + (xs[i] - *xmin) * scale, py = 30 + (*ymax - ys[i]) * scale;
        s << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << h * scale + 0.5 << "\" height=\""
          << h * scale + 0.5 << "\" fill=\"" << detail::colour((values[i] - *vmin) / span) << "\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

/// Polyline of y against x with axis extremes annotated.
inline std::string svg_curve(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel) {
    require(x.size() == y.size() && !x.empty(), ErrorKind::invalid_argument, "svg_curve: inconsistent inputs");
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double dx = *xmax - *xmin > 0 ? *xmax - *xmin : 1.0, dy = *ymax - *ymin > 0 ? *ymax - *ymin : 1.0;
    auto px = [&](double v) { return 60 + 400 * (v - *xmin) / dx; };
    auto py = [&](double v) { return 330 - 280 * (v - *ymin) / dy; };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"380\">\n";
    s << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    s << "<line x1=\"60\" y1=\"330\" x2=\"460\" y2=\"330\" stroke=\"black\"/>\n";
    s << "<line x1=\"60\" y1=\"50\" x2=\"60\" y2=\"330\" stroke=\"black\"/>\n";
    s << "<text x=\"230\" y=\"365\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel << "</text>\n";
    s << "<text x=\"5\" y=\"45\" font-family=\"sans-serif\" font-size=\"12\">" << ylabel << "</text>\n";
    s << "<text x=\"55\" y=\"345\" font-size=\"10\">" << num(*xmin) << "</text>";
    s << "<text x=\"440\" y=\"345\" font-size=\"10\">" << num(*xmax) << "</text>\n";
    s << "<text x=\"5\" y=\"330\" font-size=\"10\">" << num(*ymin) << "</text>";
    s << "<text x=\"5\" y=\"60\" font-size=\"10\">" << num(*ymax) << "</text>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) s << px(x[i]) << ',' << py(y[i]) << ' ';
    s << "\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        s << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(y[i]) << "\" r=\"3\" fill=\"#1f6fb4\"/>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace gapkit::report
