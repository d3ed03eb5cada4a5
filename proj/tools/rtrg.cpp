#include <iostream>
#include <optional>
#include <charconv>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rtrg/config.hpp"
#include "rtrg/error.hpp"
#include "rtrg/run.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<double> alpha, temperature, omega_c, tmax;
    std::vector<double> rect, grid, alphas;
    std::optional<std::string> out, format;
    std::optional<int> jobs;
    std::vector<std::string> set;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--alpha", o.alpha, "ohmic coupling");
    sub->add_option("--temperature", o.temperature, "temperature [T_K]");
    sub->add_option("--omega-c", o.omega_c, "bandwidth [T_K]");
    sub->add_option("--rect", o.rect, "map window x0 x1 y0 y1 [T_K]")->expected(4);
    sub->add_option("--grid", o.grid, "map grid nx ny")->expected(2);
    sub->add_option("--tmax", o.tmax, "last time of the trace [1/T_K]");
    sub->add_option("--alphas", o.alphas, "coupling grid for phase/analytic")->delimiter(',');
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "comma separated subset of csv,json,gnuplot");
    sub->add_option("--jobs", o.jobs, "worker threads, 0 for all");
    sub->add_option("--set", o.set, "any config key as key=value");
}

std::string num(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

rtrg::RunConfig resolve(rtrg::Command cmd, const Overrides& o) {
    rtrg::RunConfig c;
    if (!o.config.empty()) c = rtrg::load_config_file(o.config, c);
    c.command = cmd;
    std::vector<std::pair<std::string, std::string>> kv;
    if (o.alpha) kv.emplace_back("alpha", num(*o.alpha));
    if (o.temperature) kv.emplace_back("temperature", num(*o.temperature));
    if (o.omega_c) kv.emplace_back("omega_c", num(*o.omega_c));
    if (o.tmax) kv.emplace_back("tmax", num(*o.tmax));
    if (!o.rect.empty()) {
        const char* keys[] = {"rect_x0", "rect_x1", "rect_y0", "rect_y1"};
        for (int i = 0; i < 4; ++i) kv.emplace_back(keys[i], num(o.rect[i]));
    }
    if (!o.grid.empty()) {
        kv.emplace_back("nx", num(o.grid[0]));
        kv.emplace_back("ny", num(o.grid[1]));
    }
    if (!o.alphas.empty()) {
        std::string s;
        for (double a : o.alphas) s += (s.empty() ? "" : ",") + num(a);
        kv.emplace_back("alpha_grid", s);
    } else if (o.alpha && (cmd == rtrg::Command::Phase || cmd == rtrg::Command::Analytic)) {
        kv.emplace_back("alpha_grid", num(*o.alpha));
    }
    if (o.out) kv.emplace_back("out", *o.out);
    if (o.format) kv.emplace_back("formats", *o.format);
    if (o.jobs) kv.emplace_back("jobs", std::to_string(*o.jobs));
    for (const auto& s : o.set) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw rtrg::ConfigError("--set expects key=value, got '" + s + "'");
        kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    rtrg::apply_kv(c, kv);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-temperature RTRG for the ohmic spin-boson model"};
    app.require_subcommand(1);

    Overrides o;
    struct Sub {
        const char* name;
        const char* help;
        rtrg::Command cmd;
    };
    const Sub subs[] = {
        {"flow", "rates Gamma_1, Gamma_2 along a vertical line", rtrg::Command::Flow},
        {"map", "Cauchy-Riemann residual of Pi_1 on a rectangle", rtrg::Command::Map},
        {"pt", "relaxation trace P(t) and its classification", rtrg::Command::Pt},
        {"poles", "poles, axis poles and axis singularities", rtrg::Command::Poles},
        {"phase", "transition temperatures on an alpha grid", rtrg::Command::Phase},
        {"analytic", "closed-form transition temperatures", rtrg::Command::Analytic},
    };
    std::vector<std::pair<CLI::App*, rtrg::Command>> apps;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, o);
        apps.emplace_back(sub, s.cmd);
    }

    std::string manifest, replay_out;
    auto* rep = app.add_subcommand("replay", "re-run a manifest.json or run.cfg and compare checksums");
    rep->add_option("manifest", manifest, "manifest.json or run.cfg")->required()->check(CLI::ExistingFile);
    rep->add_option("--out", replay_out, "output directory for the re-run")->required();

    auto* schema = app.add_subcommand("schema", "print every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? rtrg::kExitOk : rtrg::kExitConfig;
    }

    if (schema->parsed()) {
        rtrg::RunConfig def;
        for (const auto& k : rtrg::config_schema())
            std::cout << k.key << " = " << k.get(def) << "    # " << k.doc << "\n";
        return rtrg::kExitOk;
    }
    if (rep->parsed()) return rtrg::replay(manifest, replay_out, std::cout);

    for (const auto& [sub, cmd] : apps) {
        if (!sub->parsed()) continue;
        rtrg::RunConfig c;
        try {
            c = resolve(cmd, o);
        } catch (const rtrg::Error& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return rtrg::kExitConfig;
        }
        return rtrg::run(c, std::cout);
    }
    return rtrg::kExitConfig;
}
