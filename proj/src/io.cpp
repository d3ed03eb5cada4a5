#include "rtrg/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "rtrg/error.hpp"

namespace rtrg {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ArtifactWriter::ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_ + "': " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    files_.emplace_back(name, sha256_hex(content));
}

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

} // namespace

std::string flow_csv(const std::vector<FlowPoint>& pts) {
    std::string s = "re_E [T_K],im_E [T_K],re_gamma1 [T_K],im_gamma1 [T_K],re_gamma2 [T_K],im_gamma2 [T_K],status [-]\n";
    for (const auto& p : pts) {
        s += fmt_num(p.E.real()) + ',' + fmt_num(p.E.imag()) + ',';
        if (p.ok)
            s += fmt_num(p.rates.gamma1.real()) + ',' + fmt_num(p.rates.gamma1.imag()) + ',' +
                 fmt_num(p.rates.gamma2.real()) + ',' + fmt_num(p.rates.gamma2.imag()) + ",ok\n";
        else
            s += ",,,,singular\n";
    }
    return s;
}

std::string flow_json(const std::vector<FlowPoint>& pts) {
    json a = json::array();
    for (const auto& p : pts) {
        if (p.ok)
            a.push_back({{"E", cplx_json(p.E)}, {"gamma1", cplx_json(p.rates.gamma1)}, {"gamma2", cplx_json(p.rates.gamma2)}});
        else
            a.push_back({{"E", cplx_json(p.E)}, {"gamma1", nullptr}, {"gamma2", nullptr}});
    }
    return a.dump(1) + "\n";
}

std::string map_csv(const ResidualMap& m) {
    std::string s = "re_E [T_K],im_E [T_K],residual [1/T_K^2]\n";
    for (std::size_t j = 0; j < m.ny; ++j)
        for (std::size_t i = 0; i < m.nx; ++i)
            s += fmt_num(m.x(i)) + ',' + fmt_num(m.y(j)) + ',' + fmt_num(m.at(i, j)) + '\n';
    return s;
}

std::string map_matrix(const ResidualMap& m) {
    std::string s = fmt_num(static_cast<double>(m.nx));
    for (std::size_t i = 0; i < m.nx; ++i) s += ' ' + fmt_num(m.x(i));
    s += '\n';
    for (std::size_t j = 0; j < m.ny; ++j) {
        s += fmt_num(m.y(j));
        for (std::size_t i = 0; i < m.nx; ++i) {
            double v = m.at(i, j);
            s += ' ' + fmt_num(v == ResidualMap::kSentinel ? std::numeric_limits<double>::quiet_NaN() : v);
        }
        s += '\n';
    }
    return s;
}

std::string map_gnuplot(const std::string& matrix_name) {
    return "set xlabel 'Re E / T_K'\n"
           "set ylabel 'Im E / T_K'\n"
           "set logscale cb\n"
           "set view map\n"
           "set palette grey negative\n"
           "plot '" +
           matrix_name + "' nonuniform matrix with image notitle\n";
}

std::string map_json(const ResidualMap& m) {
    json j = {{"rect", {m.rect.x0, m.rect.x1, m.rect.y0, m.rect.y1}},
              {"nx", m.nx},
              {"ny", m.ny},
              {"fd_step", {m.hx, m.hy}},
              {"fd_order", m.fd_order}};
    json v = json::array();
    for (double x : m.values) v.push_back(x == ResidualMap::kSentinel ? json(nullptr) : json(x));
    j["values"] = v;
    return j.dump() + "\n";
}

std::string trace_csv(const RelaxationTrace& tr, const std::string& classification) {
    std::string s = "t [1/T_K],P [1],abs_P [1],classification [-]\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        s += fmt_num(tr.times[k]) + ',' + fmt_num(tr.values[k]) + ',' + fmt_num(std::abs(tr.values[k])) + ',' +
             classification + '\n';
    return s;
}

std::string trace_json(const RelaxationTrace& tr, const TraceClassification& c) {
    json j = {{"contour_shift", tr.contour_shift},
              {"window", tr.window},
              {"step", tr.step},
              {"gamma_ref", tr.gamma_ref},
              {"gamma_lead", num_or_null(tr.gamma_lead)},
              {"tail_estimate", tr.tail_estimate},
              {"classification", c.regime ? regime_name(*c.regime) : "inconclusive"},
              {"zeros", c.zeros},
              {"half_period", c.half_period},
              {"t_end", c.t_end},
              {"reason", c.reason},
              {"t", tr.times},
              {"P", tr.values},
              {"noise", tr.noise}};
    return j.dump() + "\n";
}

std::string trace_gnuplot(const std::string& csv_name) {
    return "set datafile separator ','\n"
           "set multiplot layout 1,2\n"
           "set xlabel 't T_K'\n"
           "set ylabel 'P(t)'\n"
           "plot '" +
           csv_name +
           "' every ::1 using 1:2 with lines notitle\n"
           "set logscale y\n"
           "set ylabel '|P(t)|'\n"
           "plot '' every ::1 using 1:3 with lines notitle\n"
           "unset multiplot\n";
}

std::string features_json(const SpectralFeatures& f, const ModelParams& p) {
    json poles = json::array();
    for (const auto& q : f.poles)
        poles.push_back({{"z", cplx_json(q.z)},
                         {"mirror", cplx_json(q.mirror())},
                         {"omega", q.omega},
                         {"decay", q.decay},
                         {"finite_frequency", q.finite_frequency}});
    json j = {{"alpha", p.alpha},
              {"g", p.g},
              {"temperature", f.temperature},
              {"omega_c", p.omega_c},
              {"poles", poles},
              {"axis_poles", f.axis_poles},
              {"imag_singularities", f.imag_singularities},
              {"regime", f.regime ? json(regime_name(*f.regime)) : json(nullptr)}};
    return j.dump(1) + "\n";
}

std::string features_csv(const SpectralFeatures& f) {
    std::string s = "kind [-],re_z [T_K],im_z [T_K]\n";
    for (const auto& q : f.poles) {
        s += "pole," + fmt_num(q.z.real()) + ',' + fmt_num(q.z.imag()) + '\n';
        s += "pole," + fmt_num(q.mirror().real()) + ',' + fmt_num(q.mirror().imag()) + '\n';
    }
    for (double g : f.axis_poles) s += "axis_pole,0," + fmt_num(-g) + '\n';
    for (double g : f.imag_singularities) s += "singularity,0," + fmt_num(-g) + '\n';
    return s;
}

std::string phase_json(const std::vector<PhaseRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"alpha", r.alpha},
                     {"tc1_numeric", opt(r.tc1_numeric)},
                     {"tc2_numeric", opt(r.tc2_numeric)},
                     {"tc1_analytic", opt(r.tc1_analytic)},
                     {"tc2_analytic", opt(r.tc2_analytic)},
                     {"tc2_small_g", opt(r.tc2_small_g)},
                     {"flags", r.flags}});
    return a.dump(1) + "\n";
}

} // namespace rtrg
