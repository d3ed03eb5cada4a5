#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rtrg/flow.hpp"
#include "rtrg/phase.hpp"
#include "rtrg/spectral.hpp"
#include "rtrg/time_domain.hpp"

namespace rtrg {

enum class Command { Flow, Map, Pt, Poles, Phase, Analytic };

const char* command_name(Command c);
Command parse_command(const std::string& s);

// Every tunable of a run. Defaults here are the documented defaults.
struct RunConfig {
    Command command = Command::Pt;

    double alpha = 0.45;
    double temperature = 0.01;
    double omega_c = kDefaultOmegaC;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;

    // flow: rates along Re E = flow_x from flow_y_top down to flow_y_bottom
    double flow_x = 0.0;
    double flow_y_top = 2.0;
    double flow_y_bottom = -1.0;
    std::size_t flow_n = 61;

    // map
    Rectangle rect;
    std::size_t nx = 61, ny = 31;
    double fd_step = 0.0;
    int fd_order = 2;

    // pt
    double tmin = 0.01;
    double tmax = 50.0;
    std::size_t nt = 2000;
    double e_max = 200.0;
    double shift_factor = 0.95;
    std::size_t chunks = 64;

    // poles
    std::size_t singularities = 4;
    double omega_tol = 1e-3;
    double track_dT = 0.05;

    // phase and analytic
    std::vector<double> alpha_grid{0.35, 0.38, 0.40, 0.42, 0.43, 0.45, 0.47, 0.48, 0.49, 0.5, 0.55};
    double t_tol = 1e-3;
    double tc1_lo = 1e-3, tc1_hi = 0.4;
    double tc2_lo = 0.05, tc2_hi = 1.0;

    std::string out = "out";
    std::vector<std::string> formats{"csv"};
    int jobs = 0; // 0: all hardware threads

    bool wants(const std::string& fmt) const;
    ModelParams model() const;
    AccuracySpec accuracy() const;
    QuadSpec quad() const;
    FeatureOptions features() const;
    TransitionSpec transitions() const;
};

struct ConfigKey {
    std::string key;
    std::string doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_schema();

// flat "key = value" text, '#' starts a comment
std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text);
void apply_kv(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv);
std::map<std::string, std::string> to_kv(const RunConfig& cfg);
std::string to_kv_text(const RunConfig& cfg);
// throws ConfigError on inconsistent values
void validate(const RunConfig& cfg);

RunConfig load_config_file(const std::string& path, RunConfig base = {});

} // namespace rtrg
