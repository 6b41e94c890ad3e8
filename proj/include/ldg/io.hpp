#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldg/continuation.hpp"
#include "ldg/grid.hpp"
#include "ldg/newton.hpp"
#include "ldg/parameters.hpp"
#include "ldg/state.hpp"

namespace ldg {

/// Unreadable, unwritable or malformed files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Run configuration: key = value lines, '#' starts a comment.

struct RunConfig {
    std::optional<double> A;  // default -B^2/(3C)
    double B = kDefaultB;
    double C = kDefaultC;
    double L2 = 0.0;
    double lambda_bar_sq = 5.0;
    std::optional<double> epsilon;  // default max(0.05, 3h)
    int n = 257;
    NewtonOptions newton;
    std::string seed = "wors";
    int eigen_k = 5;

    std::string sweep_axis = "lambda_bar_sq";
    double sweep_start = 0.1;
    double sweep_end = 500.0;
    double sweep_step = 5.0;
    bool sweep_symmetric = false;
    std::vector<std::string> sweep_seeds{"wors"};

    int asymptotic_order = 1;
    int series_terms = kDefaultSeriesTerms;
    int geodesic_segments = 400;

    std::string render_quantity = "s_sq";
    int render_scale = 2;
    int render_stride = 8;

    [[nodiscard]] Parameters parameters() const {
        const Grid g(n);
        const double a = A ? *A : -B * B / (3.0 * C);
        return make_parameters(a, B, C, L2, lambda_bar_sq, epsilon ? *epsilon : default_epsilon(g));
    }

    /// Throws ConfigError for unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);
    void validate() const;
};

namespace detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(d)) throw ConfigError("bad number for " + key + ": '" + v + "'");
    return d;
}

inline int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("expected an integer for " + key);
    return static_cast<int>(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected a boolean for " + key);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}
}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& raw) {
    using namespace detail;
    const std::string v = trim(raw);
    if (key == "A") A = parse_double(key, v);
    else if (key == "B") B = parse_double(key, v);
    else if (key == "C") C = parse_double(key, v);
    else if (key == "L2") L2 = parse_double(key, v);
    else if (key == "lambda_bar_sq") lambda_bar_sq = parse_double(key, v);
    else if (key == "epsilon") epsilon = parse_double(key, v);
    else if (key == "n") n = parse_int(key, v);
    else if (key == "newton.tol") newton.tol_residual = parse_double(key, v);
    else if (key == "newton.max_iter") newton.max_iter = parse_int(key, v);
    else if (key == "seed") seed = v;
    else if (key == "eigen.k") eigen_k = parse_int(key, v);
    else if (key == "sweep.axis") sweep_axis = v;
    else if (key == "sweep.start") sweep_start = parse_double(key, v);
    else if (key == "sweep.end") sweep_end = parse_double(key, v);
    else if (key == "sweep.step") sweep_step = parse_double(key, v);
    else if (key == "sweep.symmetric") sweep_symmetric = parse_bool(key, v);
    else if (key == "sweep.seeds") sweep_seeds = split_list(v);
    else if (key == "asymptotic.order") asymptotic_order = parse_int(key, v);
    else if (key == "series.terms") series_terms = parse_int(key, v);
    else if (key == "geodesic.segments") geodesic_segments = parse_int(key, v);
    else if (key == "render.quantity") render_quantity = v;
    else if (key == "render.scale") render_scale = parse_int(key, v);
    else if (key == "render.stride") render_stride = parse_int(key, v);
    else throw ConfigError("unknown config key: " + key);
}

inline void RunConfig::validate() const {
    (void)parameters();  // grid and parameter checks
    newton.validate();
    seed_kind_from_string(seed);
    for (const auto& s : sweep_seeds) seed_kind_from_string(s);
    if (sweep_axis != "lambda_bar_sq" && sweep_axis != "L2")
        throw ConfigError("sweep.axis must be lambda_bar_sq or L2");
    if (!(sweep_step > 0)) throw ConfigError("sweep.step must be positive");
    if (eigen_k < 1) throw ConfigError("eigen.k must be >= 1");
    if (asymptotic_order != 1 && asymptotic_order != 2)
        throw ConfigError("asymptotic.order must be 1 or 2");
    if (series_terms < 1) throw ConfigError("series.terms must be >= 1");
    if (geodesic_segments < 2) throw ConfigError("geodesic.segments must be >= 2");
    if (render_scale < 1 || render_stride < 1) throw ConfigError("render scale/stride must be >= 1");
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    return parse_config(f);
}

// ---------------------------------------------------------------------------
// Snapshots

inline constexpr int kSnapshotSchema = 1;

struct SnapshotMeta {
    std::string label = "Unclassified";
    double residual = 0.0;
    std::optional<double> min_eig;
    int iterations = 0;
};

struct StateSnapshot {
    Parameters params;
    State state;
    SnapshotMeta meta;
};

inline nlohmann::json parameters_to_json(const Parameters& p) {
    return {{"A", p.A},   {"B", p.B},   {"C", p.C},
            {"L2", p.L2}, {"lambda_bar_sq", p.lambda_bar_sq}, {"epsilon", p.epsilon},
            {"s_plus", p.s_plus}};
}

inline Parameters parameters_from_json(const nlohmann::json& j) {
    Parameters p = make_parameters(j.at("A").get<double>(), j.at("B").get<double>(),
                                   j.at("C").get<double>(), j.at("L2").get<double>(),
                                   j.at("lambda_bar_sq").get<double>(), j.at("epsilon").get<double>());
    p.s_plus = j.at("s_plus").get<double>();
    return p;
}

inline std::string snapshot_to_string(const StateSnapshot& s) {
    nlohmann::json j;
    j["schema_version"] = kSnapshotSchema;
    j["parameters"] = parameters_to_json(s.params);
    j["n"] = s.state.n();
    j["q1"] = s.state.q1.values;
    j["q2"] = s.state.q2.values;
    j["q3"] = s.state.q3.values;
    nlohmann::json m;
    m["label"] = s.meta.label;
    m["residual"] = s.meta.residual;
    m["min_eig"] = s.meta.min_eig ? nlohmann::json(*s.meta.min_eig) : nlohmann::json(nullptr);
    m["iterations"] = s.meta.iterations;
    j["metadata"] = m;
    return j.dump() + "\n";
}

inline StateSnapshot snapshot_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("snapshot is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kSnapshotSchema)
            throw IoError("unsupported snapshot schema version");
        StateSnapshot s;
        s.params = parameters_from_json(j.at("parameters"));
        const int n = j.at("n").get<int>();
        const Grid g(n);
        s.state = State(g);
        const char* names[3] = {"q1", "q2", "q3"};
        for (int c = 0; c < 3; ++c) {
            auto v = j.at(names[c]).get<std::vector<double>>();
            if (v.size() != g.size()) throw IoError(std::string(names[c]) + " has wrong length");
            s.state.field(c).values = std::move(v);
        }
        const auto& m = j.at("metadata");
        s.meta.label = m.at("label").get<std::string>();
        s.meta.residual = m.at("residual").get<double>();
        if (!m.at("min_eig").is_null()) s.meta.min_eig = m.at("min_eig").get<double>();
        s.meta.iterations = m.at("iterations").get<int>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed snapshot: ") + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_snapshot(const std::string& path, const StateSnapshot& s) {
    write_text(path, snapshot_to_string(s));
}

inline StateSnapshot read_snapshot(const std::string& path) {
    return snapshot_from_string(read_text(path));
}

// ---------------------------------------------------------------------------
// Branch CSV and manifest

inline constexpr const char* kBranchCsvHeader =
    "lambda_bar_sq,L2,m1,m2,energy_shifted,min_eig,label,iterations";

namespace detail {
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

inline std::string branch_to_csv(const Branch& b) {
    std::string out = std::string(kBranchCsvHeader) + "\n";
    for (const BranchRecord& r : b.records) {
        out += detail::fmt17(r.lambda_bar_sq) + "," + detail::fmt17(r.L2) + "," + detail::fmt17(r.m1) +
               "," + detail::fmt17(r.m2) + "," + detail::fmt17(r.energy_shifted) + "," +
               detail::fmt17(r.min_eig) + "," + to_string(r.label) + "," +
               std::to_string(r.iterations) + "\n";
    }
    return out;
}

inline std::vector<BranchRecord> branch_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || detail::trim(line) != kBranchCsvHeader)
        throw IoError("branch CSV header mismatch");
    std::vector<BranchRecord> out;
    while (std::getline(ss, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string item;
        while (std::getline(ls, item, ',')) f.push_back(item);
        if (f.size() != 8) throw IoError("branch CSV row has wrong column count");
        BranchRecord r;
        r.lambda_bar_sq = std::strtod(f[0].c_str(), nullptr);
        r.L2 = std::strtod(f[1].c_str(), nullptr);
        r.m1 = std::strtod(f[2].c_str(), nullptr);
        r.m2 = std::strtod(f[3].c_str(), nullptr);
        r.energy_shifted = std::strtod(f[4].c_str(), nullptr);
        r.min_eig = std::strtod(f[5].c_str(), nullptr);
        r.label = label_from_string(f[6]);
        r.iterations = std::stoi(f[7]);
        out.push_back(r);
    }
    return out;
}

struct ManifestEntry {
    std::string name;
    std::string file;
    std::size_t records = 0;
    bool terminated = false;
    std::string message;
};

inline std::string manifest_to_string(const std::vector<ManifestEntry>& entries,
                                      const Parameters& p, int n, const std::string& axis) {
    nlohmann::json j;
    j["schema_version"] = kSnapshotSchema;
    j["parameters"] = parameters_to_json(p);
    j["n"] = n;
    j["axis"] = axis;
    j["branches"] = nlohmann::json::array();
    for (const auto& e : entries)
        j["branches"].push_back({{"name", e.name},
                                 {"file", e.file},
                                 {"records", e.records},
                                 {"terminated", e.terminated},
                                 {"message", e.message}});
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Rendering (binary PPM)

enum class RenderQuantity { q1, q2, q3, s_sq, director_overlay };

inline RenderQuantity render_quantity_from_string(const std::string& s) {
    if (s == "q1") return RenderQuantity::q1;
    if (s == "q2") return RenderQuantity::q2;
    if (s == "q3") return RenderQuantity::q3;
    if (s == "s_sq") return RenderQuantity::s_sq;
    if (s == "director_overlay") return RenderQuantity::director_overlay;
    throw ConfigError("unknown render quantity: " + s);
}

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major from the top row (y = 1)

    [[nodiscard]] std::array<std::uint8_t, 3> pixel(int px, int py) const {
        const std::size_t k = 3 * (static_cast<std::size_t>(py) * width + px);
        return {rgb[k], rgb[k + 1], rgb[k + 2]};
    }
    [[nodiscard]] std::string to_ppm() const {
        std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
        out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
        return out;
    }
};

/// Dark-to-bright colour ramp; r + g + b increases strictly with t in [0, 1].
inline std::array<std::uint8_t, 3> colormap(double t) {
    static constexpr double stops[5][3] = {
        {0, 0, 4}, {87, 16, 110}, {188, 55, 84}, {249, 142, 9}, {252, 255, 164}};
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * 4.0;
    const int k = std::min(3, static_cast<int>(x));
    const double f = x - k;
    std::array<std::uint8_t, 3> c{};
    for (int a = 0; a < 3; ++a)
        c[a] = static_cast<std::uint8_t>(std::lround(stops[k][a] + f * (stops[k + 1][a] - stops[k][a])));
    return c;
}

/// Field shown for a quantity and its fixed colour range.
inline std::pair<ScalarField, std::array<double, 2>> render_field(const Grid& g,
                                                                  const StateSnapshot& snap,
                                                                  RenderQuantity q) {
    const double s = snap.params.s_plus;
    switch (q) {
        case RenderQuantity::q1: return {snap.state.q1, {-s / 2, s / 2}};
        case RenderQuantity::q2: return {snap.state.q2, {-s / 2, s / 2}};
        case RenderQuantity::q3: return {snap.state.q3, {-s / 6, s / 3}};
        case RenderQuantity::s_sq:
        case RenderQuantity::director_overlay:
            return {director_view(g, snap.state).s_sq, {0.0, s * s / 4}};
    }
    throw ConfigError("unknown render quantity");
}

/// One block of `scale` x `scale` pixels per node; the director overlay adds
/// white segments through every `stride`-th node.
inline Image render(const StateSnapshot& snap, RenderQuantity q, int scale = 2, int stride = 8) {
    if (scale < 1 || stride < 1) throw ConfigError("render scale/stride must be >= 1");
    const Grid g(snap.state.n());
    const auto [field, range] = render_field(g, snap, q);
    const int n = g.n();
    Image img;
    img.width = img.height = n * scale;
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);
    auto put = [&](int px, int py, std::array<std::uint8_t, 3> c) {
        if (px < 0 || py < 0 || px >= img.width || py >= img.height) return;
        const std::size_t k = 3 * (static_cast<std::size_t>(py) * img.width + px);
        img.rgb[k] = c[0];
        img.rgb[k + 1] = c[1];
        img.rgb[k + 2] = c[2];
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const auto c = colormap((field(i, j) - range[0]) / (range[1] - range[0]));
            const int row = n - 1 - j;
            for (int a = 0; a < scale; ++a)
                for (int b = 0; b < scale; ++b) put(i * scale + b, row * scale + a, c);
        }
    if (q == RenderQuantity::director_overlay) {
        const DirectorView v = director_view(g, snap.state);
        const double half = 0.4 * stride * scale;
        for (int j = stride / 2; j < n; j += stride)
            for (int i = stride / 2; i < n; i += stride) {
                const double cx = (i + 0.5) * scale;
                const double cy = (n - 1 - j + 0.5) * scale;
                const double dx = v.nx(i, j) * half;
                const double dy = -v.ny(i, j) * half;
                const int steps = static_cast<int>(std::ceil(2 * half)) + 1;
                for (int t = 0; t <= steps; ++t) {
                    const double u = -1.0 + 2.0 * t / steps;
                    put(static_cast<int>(std::floor(cx + u * dx)), static_cast<int>(std::floor(cy + u * dy)),
                        {255, 255, 255});
                }
            }
    }
    return img;
}

}  // namespace ldg
