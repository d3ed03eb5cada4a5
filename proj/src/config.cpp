#include "rtrg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rtrg/error.hpp"

namespace rtrg {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// shortest form that round-trips
std::string num(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + s + "'");
    }
}

std::size_t to_size(const std::string& key, const std::string& s) {
    double v = to_double(key, s);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("config key '" + key + "': expected a count: '" + s + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (const auto& x : v) {
        if (!s.empty()) s += ",";
        if constexpr (std::is_same_v<T, double>)
            s += num(x);
        else
            s += x;
    }
    return s;
}

ConfigKey real(const char* key, const char* doc, double RunConfig::*m) {
    return {key, doc, [m](const RunConfig& c) { return num(c.*m); },
            [m, key](RunConfig& c, const std::string& s) { c.*m = to_double(key, s); }};
}

ConfigKey count(const char* key, const char* doc, std::size_t RunConfig::*m) {
    return {key, doc, [m](const RunConfig& c) { return std::to_string(c.*m); },
            [m, key](RunConfig& c, const std::string& s) { c.*m = to_size(key, s); }};
}

ConfigKey rect_edge(const char* key, const char* doc, double Rectangle::*m) {
    return {key, doc, [m](const RunConfig& c) { return num(c.rect.*m); },
            [m, key](RunConfig& c, const std::string& s) { c.rect.*m = to_double(key, s); }};
}

} // namespace

const char* command_name(Command c) {
    switch (c) {
    case Command::Flow: return "flow";
    case Command::Map: return "map";
    case Command::Pt: return "pt";
    case Command::Poles: return "poles";
    case Command::Phase: return "phase";
    case Command::Analytic: return "analytic";
    }
    return "?";
}

Command parse_command(const std::string& s) {
    for (Command c : {Command::Flow, Command::Map, Command::Pt, Command::Poles, Command::Phase, Command::Analytic})
        if (s == command_name(c)) return c;
    throw ConfigError("unknown command '" + s + "'");
}

bool RunConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

ModelParams RunConfig::model() const { return derive_scales(alpha, omega_c, temperature); }

AccuracySpec RunConfig::accuracy() const {
    AccuracySpec a;
    a.rel = rel_tol;
    a.abs = abs_tol;
    return a;
}

QuadSpec RunConfig::quad() const {
    QuadSpec q;
    q.e_max = e_max;
    q.shift_factor = shift_factor;
    q.chunks = chunks;
    q.tol = accuracy();
    return q;
}

FeatureOptions RunConfig::features() const {
    FeatureOptions f;
    f.singularities = singularities;
    f.track_dT = track_dT;
    f.pole.omega_tol = omega_tol;
    f.pole.tol = accuracy();
    f.sing.axis.tol = accuracy();
    return f;
}

TransitionSpec RunConfig::transitions() const {
    TransitionSpec t;
    t.tc1_bracket = {tc1_lo, tc1_hi};
    t.tc2_bracket = {tc2_lo, tc2_hi};
    t.t_tol = t_tol;
    t.track_dT = track_dT;
    t.omega_c = omega_c;
    t.pole.omega_tol = omega_tol;
    t.pole.tol = accuracy();
    t.axis.tol = accuracy();
    return t;
}

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema = {
        {"command", "flow | map | pt | poles | phase | analytic",
         [](const RunConfig& c) { return std::string(command_name(c.command)); },
         [](RunConfig& c, const std::string& s) { c.command = parse_command(s); }},
        real("alpha", "ohmic coupling", &RunConfig::alpha),
        real("temperature", "bath temperature [T_K]", &RunConfig::temperature),
        real("omega_c", "bandwidth [T_K]", &RunConfig::omega_c),
        real("rel_tol", "flow integrator relative tolerance", &RunConfig::rel_tol),
        real("abs_tol", "flow integrator absolute tolerance [T_K]", &RunConfig::abs_tol),
        real("flow_x", "flow: Re E of the sampled line [T_K]", &RunConfig::flow_x),
        real("flow_y_top", "flow: upper Im E [T_K]", &RunConfig::flow_y_top),
        real("flow_y_bottom", "flow: lower Im E [T_K]", &RunConfig::flow_y_bottom),
        count("flow_n", "flow: number of points", &RunConfig::flow_n),
        rect_edge("rect_x0", "map: left Re E [T_K]", &Rectangle::x0),
        rect_edge("rect_x1", "map: right Re E [T_K]", &Rectangle::x1),
        rect_edge("rect_y0", "map: lower Im E [T_K]", &Rectangle::y0),
        rect_edge("rect_y1", "map: upper Im E [T_K]", &Rectangle::y1),
        count("nx", "map: grid points along Re E", &RunConfig::nx),
        count("ny", "map: grid points along Im E", &RunConfig::ny),
        real("fd_step", "map: finite-difference step, 0 for the grid spacing [T_K]", &RunConfig::fd_step),
        {"fd_order", "map: finite-difference order, 2 or 4",
         [](const RunConfig& c) { return std::to_string(c.fd_order); },
         [](RunConfig& c, const std::string& s) { c.fd_order = static_cast<int>(to_size("fd_order", s)); }},
        real("tmin", "pt: first time [1/T_K]", &RunConfig::tmin),
        real("tmax", "pt: last time [1/T_K]", &RunConfig::tmax),
        count("nt", "pt: number of time samples", &RunConfig::nt),
        real("e_max", "pt: trapezoid window half width [T_K]", &RunConfig::e_max),
        real("shift_factor", "pt: contour at Im E = -shift_factor * leading rate", &RunConfig::shift_factor),
        count("chunks", "pt: independent sweeps along the contour", &RunConfig::chunks),
        count("singularities", "poles: axis singularities to report", &RunConfig::singularities),
        real("omega_tol", "frequency below which a pole counts as zero-frequency [T_K]", &RunConfig::omega_tol),
        real("track_dT", "temperature step of pole continuation [T_K]", &RunConfig::track_dT),
        {"alpha_grid", "phase/analytic: comma separated couplings",
         [](const RunConfig& c) { return join(c.alpha_grid); },
         [](RunConfig& c, const std::string& s) {
             c.alpha_grid.clear();
             for (const auto& x : split_list(s)) c.alpha_grid.push_back(to_double("alpha_grid", x));
         }},
        real("t_tol", "phase: bisection width [T_K]", &RunConfig::t_tol),
        real("tc1_lo", "phase: lower bracket for T_c1 [T_K]", &RunConfig::tc1_lo),
        real("tc1_hi", "phase: upper bracket for T_c1 [T_K]", &RunConfig::tc1_hi),
        real("tc2_lo", "phase: lower bracket for T_c2 [T_K]", &RunConfig::tc2_lo),
        real("tc2_hi", "phase: upper bracket for T_c2 [T_K]", &RunConfig::tc2_hi),
        {"out", "output directory", [](const RunConfig& c) { return c.out; },
         [](RunConfig& c, const std::string& s) { c.out = s; }},
        {"formats", "comma separated subset of csv,json,gnuplot",
         [](const RunConfig& c) { return join(c.formats); },
         [](RunConfig& c, const std::string& s) { c.formats = split_list(s); }},
        {"jobs", "worker threads, 0 for all", [](const RunConfig& c) { return std::to_string(c.jobs); },
         [](RunConfig& c, const std::string& s) { c.jobs = static_cast<int>(to_size("jobs", s)); }},
    };
    return schema;
}

std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(text);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

void apply_kv(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
    const auto& schema = config_schema();
    for (const auto& [k, v] : kv) {
        auto it = std::find_if(schema.begin(), schema.end(), [&](const ConfigKey& e) { return e.key == k; });
        if (it == schema.end()) throw ConfigError("unknown config key '" + k + "'");
        it->set(cfg, v);
    }
}

std::map<std::string, std::string> to_kv(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    for (const auto& e : config_schema()) m[e.key] = e.get(cfg);
    return m;
}

std::string to_kv_text(const RunConfig& cfg) {
    std::string s;
    for (const auto& e : config_schema()) s += e.key + " = " + e.get(cfg) + "\n";
    return s;
}

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
    need(c.temperature >= 0.0, "temperature must be non-negative");
    need(c.omega_c >= kScalingFloor, "omega_c below the scaling floor");
    need(c.rel_tol > 0.0 && c.abs_tol > 0.0, "tolerances must be positive");
    need(c.flow_n >= 2, "flow_n must be at least 2");
    need(c.rect.x0 < c.rect.x1 && c.rect.y0 < c.rect.y1, "rect must have x0 < x1 and y0 < y1");
    need(c.nx >= 16 && c.ny >= 16, "map grid needs at least 16 x 16 points");
    need(c.fd_order == 2 || c.fd_order == 4, "fd_order must be 2 or 4");
    need(c.fd_step >= 0.0, "fd_step must be non-negative");
    need(c.tmin > 0.0 && c.tmax > c.tmin, "need 0 < tmin < tmax");
    need(c.nt >= 2, "nt must be at least 2");
    need(c.e_max > 0.0, "e_max must be positive");
    need(c.shift_factor > 0.0 && c.shift_factor < 1.0, "shift_factor must lie in (0, 1)");
    need(c.chunks >= 1, "chunks must be positive");
    need(c.omega_tol > 0.0 && c.track_dT > 0.0 && c.t_tol > 0.0, "omega_tol, track_dT and t_tol must be positive");
    need(c.tc1_lo < c.tc1_hi && c.tc2_lo < c.tc2_hi, "transition brackets must be ordered");
    need(!c.alpha_grid.empty(), "alpha_grid is empty");
    for (double a : c.alpha_grid) need(a > 0.0 && a < 1.0, "alpha_grid values must lie in (0, 1)");
    need(!c.out.empty(), "out must name a directory");
    need(c.jobs >= 0, "jobs must be non-negative");
    for (const auto& f : c.formats) need(f == "csv" || f == "json" || f == "gnuplot", "unknown format '" + f + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_kv(base, parse_kv_text(ss.str()));
    return base;
}

} // namespace rtrg
