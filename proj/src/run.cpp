#include "rtrg/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rtrg/analytic.hpp"
#include "rtrg/error.hpp"
#include "rtrg/io.hpp"
#include "rtrg/kernels.hpp"

namespace rtrg {

using nlohmann::json;

namespace {

std::string tag(const RunConfig& c, bool with_T) {
    char buf[64];
    if (with_T)
        std::snprintf(buf, sizeof buf, "alpha%.4g_T%.4g", c.alpha, c.temperature);
    else
        std::snprintf(buf, sizeof buf, "alpha%.4g", c.alpha);
    return buf;
}

int run_flow(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    const ModelParams p = c.model();
    const AccuracySpec tol = c.accuracy();
    std::vector<FlowPoint> pts(c.flow_n);
    for_each_index(c.flow_n, Exec::Parallel, [&](std::size_t k) {
        double y = c.flow_y_top + (c.flow_y_bottom - c.flow_y_top) * static_cast<double>(k) /
                                      static_cast<double>(c.flow_n - 1);
        cplx E(c.flow_x, y);
        try {
            pts[k] = {E, evaluate_rates(E, p, tol)};
        } catch (const FlowSingularityError&) {
            pts[k] = {E, {}, false}; // below a singularity of the flow
        }
    });
    const auto bad = static_cast<std::size_t>(std::count_if(pts.begin(), pts.end(), [](const FlowPoint& q) { return !q.ok; }));
    if (bad == pts.size()) throw FlowSingularityError("flow: every point lies beyond a singularity", cplx(c.flow_x, c.flow_y_top));
    const std::string base = "flow_" + tag(c, true);
    if (c.wants("csv")) w.write(base + ".csv", flow_csv(pts));
    if (c.wants("json")) w.write(base + ".json", flow_json(pts));
    log << "flow: " << pts.size() << " points, " << bad << " beyond a singularity\n";
    return kExitOk;
}

int run_map(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    MapOptions opt;
    opt.fd_step = c.fd_step;
    opt.fd_order = c.fd_order;
    opt.tol = c.accuracy();
    ResidualMap m = cr_residual_map(c.model(), c.rect, c.nx, c.ny, opt);
    const std::string base = "map_" + tag(c, true);
    if (c.wants("csv")) w.write(base + ".csv", map_csv(m));
    if (c.wants("json")) w.write(base + ".json", map_json(m));
    if (c.wants("gnuplot")) {
        w.write(base + ".dat", map_matrix(m));
        w.write(base + ".gp", map_gnuplot(base + ".dat"));
    }
    log << "map: " << m.nx << " x " << m.ny << ", flagged " << m.flagged() << "\n";
    return kExitOk;
}

int run_pt(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    const ModelParams p = c.model();
    RelaxationTrace tr = invert_laplace(p, uniform_times(c.tmin, c.tmax, c.nt), c.quad());
    TraceClassifyOptions co;
    if (std::isfinite(tr.gamma_lead)) co.gamma_min = tr.gamma_lead;
    TraceClassification cl = classify_from_trace(tr, co);
    const std::string name = cl.regime ? regime_name(*cl.regime) : "inconclusive";
    const std::string base = "pt_" + tag(c, true);
    if (c.wants("csv")) w.write(base + ".csv", trace_csv(tr, name));
    if (c.wants("json")) w.write(base + ".json", trace_json(tr, cl));
    if (c.wants("gnuplot")) w.write(base + ".gp", trace_gnuplot(base + ".csv"));
    log << "pt: " << name << " (" << cl.zeros << " zeros";
    if (!cl.reason.empty()) log << "; " << cl.reason;
    log << ")\n";
    return kExitOk;
}

int run_poles(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    const ModelParams p = c.model();
    SpectralFeatures f = spectral_features(p, c.features());
    const std::string base = "poles_" + tag(c, true);
    w.write(base + ".json", features_json(f, p));
    if (c.wants("csv")) w.write(base + ".csv", features_csv(f));
    log << "poles: " << f.poles.size() << " pair(s), " << f.axis_poles.size() << " axis pole(s), regime "
        << (f.regime ? regime_name(*f.regime) : "undetermined") << "\n";
    return kExitOk;
}

int run_phase(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    std::vector<PhaseRow> rows = scan_phase_diagram(c.alpha_grid, c.transitions());
    if (c.wants("csv")) {
        std::ostringstream a, b;
        write_phase_csv(a, rows);
        write_comparison_csv(b, rows);
        w.write("phase.csv", a.str());
        w.write("comparison.csv", b.str());
    }
    if (c.wants("json")) w.write("phase.json", phase_json(rows));
    if (c.wants("gnuplot")) {
        std::ostringstream g;
        write_phase_gnuplot(g, "phase.csv");
        w.write("phase.gp", g.str());
    }
    const auto partial = std::count_if(rows.begin(), rows.end(), row_is_partial);
    log << "phase: " << rows.size() << " rows, " << partial << " flagged\n";
    return partial ? kExitPartial : kExitOk;
}

int run_analytic(const RunConfig& c, ArtifactWriter& w, std::ostream& log) {
    std::vector<PhaseRow> rows;
    for (double a : c.alpha_grid) rows.push_back(closed_form_row(a));
    if (c.wants("csv")) {
        std::ostringstream b;
        write_comparison_csv(b, rows);
        w.write("analytic.csv", b.str());
    }
    if (c.wants("json")) w.write("analytic.json", phase_json(rows));
    log << "analytic: " << rows.size() << " rows\n";
    return kExitOk;
}

void write_manifest(const RunConfig& c, ArtifactWriter& w) {
    json files = json::array();
    for (const auto& [name, sha] : w.artifacts()) files.push_back({{"file", name}, {"sha256", sha}});
    json m = {{"tool", "rtrg"}, {"command", command_name(c.command)}, {"config", to_kv(c)}, {"artifacts", files}};
    const std::string cfg = to_kv_text(c);
    ArtifactWriter raw(w.dir());
    raw.write("run.cfg", cfg);
    raw.write("manifest.json", m.dump(1) + "\n");
}

void write_diagnostic(const RunConfig& c, const std::string& what) {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    ArtifactWriter w(c.out);
    w.write("diagnostic.txt", "error: " + what + "\n\n" + to_kv_text(c));
}

} // namespace

bool row_is_partial(const PhaseRow& row) {
    for (const auto& f : row.flags)
        if (f != "exactly_solvable") return true;
    return false;
}

int run(const RunConfig& c, std::ostream& log) {
    try {
        validate(c);
        if (c.jobs > 0) set_threads(c.jobs);
        ArtifactWriter w(c.out);
        int code = kExitOk;
        switch (c.command) {
        case Command::Flow: code = run_flow(c, w, log); break;
        case Command::Map: code = run_map(c, w, log); break;
        case Command::Pt: code = run_pt(c, w, log); break;
        case Command::Poles: code = run_poles(c, w, log); break;
        case Command::Phase: code = run_phase(c, w, log); break;
        case Command::Analytic: code = run_analytic(c, w, log); break;
        }
        write_manifest(c, w);
        return code;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        log << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        try {
            write_diagnostic(c, e.what());
            log << "diagnostic written to " << (std::filesystem::path(c.out) / "diagnostic.txt").string() << "\n";
        } catch (const std::exception&) {
        }
        return kExitNumerical;
    }
}

int replay(const std::string& path, const std::string& out_dir, std::ostream& log) {
    RunConfig c;
    json manifest;
    try {
        const std::string text = read_file(path);
        if (std::filesystem::path(path).extension() == ".json") {
            manifest = json::parse(text);
            std::vector<std::pair<std::string, std::string>> kv;
            for (const auto& [k, v] : manifest.at("config").items()) kv.emplace_back(k, v.get<std::string>());
            apply_kv(c, kv);
        } else {
            apply_kv(c, parse_kv_text(text));
        }
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        log << "config error: malformed manifest: " << e.what() << "\n";
        return kExitConfig;
    }
    c.out = out_dir;
    int code = run(c, log);
    if (code != kExitOk && code != kExitPartial) return code;
    if (manifest.is_null()) return code;

    std::string mismatch;
    for (const auto& a : manifest.at("artifacts")) {
        const std::string name = a.at("file").get<std::string>();
        std::string sha;
        try {
            sha = sha256_hex(read_file((std::filesystem::path(out_dir) / name).string()));
        } catch (const Error&) {
            sha = "missing";
        }
        if (sha != a.at("sha256").get<std::string>()) mismatch += name + "\n";
    }
    if (!mismatch.empty()) {
        log << "replay differs:\n" << mismatch;
        write_diagnostic(c, "replay produced different artifacts:\n" + mismatch);
        return kExitNumerical;
    }
    log << "replay identical (" << manifest.at("artifacts").size() << " artifacts)\n";
    return code;
}

} // namespace rtrg
