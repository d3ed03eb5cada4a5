#include "rtrg/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "rtrg/analytic.hpp"
#include "rtrg/error.hpp"

namespace rtrg {

namespace {

// continuation cache: poles found so far, keyed by temperature
class PoleTracker {
public:
    PoleTracker(const ModelParams& base, const TransitionSpec& spec) : base_(base), spec_(spec) {}

    std::optional<Pole> at(double T) {
        ModelParams p = base_.with_temperature(T);
        PoleResult r;
        auto it = known_.upper_bound(T);
        if (it == known_.begin()) {
            r = track_pole(p, spec_.track_dT, spec_.pole);
            if (!finite(r)) r = track_pole(p, 0.2 * spec_.track_dT, spec_.pole);
        } else {
            --it;
            r = track_pole_from(p, it->first, it->second, spec_.track_dT, spec_.pole);
            // finer continuation, then fresh seeds
            if (!finite(r)) r = track_pole_from(p, it->first, it->second, 0.2 * spec_.track_dT, spec_.pole);
            for (cplx seed : {it->second, zero_t_pole_seed(p.g)}) {
                if (finite(r)) break;
                try {
                    r = find_poles(p, seed, spec_.pole);
                } catch (const DomainError&) {
                    r = PoleResult{};
                }
            }
        }
        if (!finite(r)) return std::nullopt;
        known_[T] = r.poles.front().z;
        return r.poles.front();
    }

private:
    ModelParams base_;
    TransitionSpec spec_;
    std::map<double, cplx> known_;

    static bool finite(const PoleResult& r) { return !r.poles.empty() && r.poles.front().finite_frequency; }
};

void check_alpha(double alpha) {
    const double g = 1.0 - 2.0 * alpha;
    if (!(g > 0.0 && g <= 0.4 + 1e-12))
        throw DomainError("transition search needs 0.3 <= alpha < 1/2");
}

template <class Fn>
auto at_temperature(double T, Fn&& fn) {
    try {
        return fn();
    } catch (const TransitionError&) {
        throw;
    } catch (const Error& e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (T = %.6g)", T);
        throw TransitionError(e.what() + std::string(buf), T);
    }
}

// bisection on a predicate that is false at lo and true at hi
template <class Pred>
Transition bisect(double lo, double hi, double tol, Pred&& above) {
    Transition out;
    bool a = above(lo), b = above(hi);
    out.evaluations = 2;
    if (a || !b) {
        out.note = a ? "already past the transition at the lower end" : "no transition below the upper end";
        return out;
    }
    while (hi - lo >= tol) {
        double mid = 0.5 * (lo + hi);
        ++out.evaluations;
        (above(mid) ? hi : lo) = mid;
    }
    out.T = 0.5 * (lo + hi);
    return out;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

std::string join(const std::vector<std::string>& flags) {
    std::string s;
    for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
    return s;
}

} // namespace

Transition find_tc1_numeric(double alpha, const TransitionSpec& spec) {
    check_alpha(alpha);
    const ModelParams base = derive_scales(alpha, spec.omega_c);
    PoleTracker poles(base, spec);
    auto above = [&](double T) {
        return at_temperature(T, [&] {
            AxisScan ax = axis_scan(base.with_temperature(T), spec.axis);
            auto z = poles.at(T);
            if (!z) {
                if (ax.axis_poles.empty()) throw Error("pole pair lost below the axis collision");
                return true;
            }
            return ax.gamma0 > z->decay;
        });
    };
    return bisect(spec.tc1_bracket.first, spec.tc1_bracket.second, spec.t_tol, above);
}

Transition find_tc2_numeric(double alpha, const TransitionSpec& spec) {
    check_alpha(alpha);
    const ModelParams base = derive_scales(alpha, spec.omega_c);
    // the pair reaches the axis where it splits into two zero-frequency poles
    auto above = [&](double T) {
        return at_temperature(T, [&] { return !axis_scan(base.with_temperature(T), spec.axis).axis_poles.empty(); });
    };
    Transition t = bisect(spec.tc2_bracket.first, spec.tc2_bracket.second, spec.t_tol, above);
    if (t.T) {
        PoleTracker poles(base, spec);
        // the axis scan resolves the merger only to about t_tol
        double Tl = std::max(spec.tc2_bracket.first, *t.T - 10.0 * spec.t_tol);
        auto z = at_temperature(Tl, [&] { return poles.at(Tl); });
        if (!z) t.note = "no finite-frequency pole found just below the transition";
    }
    return t;
}

PhaseRow closed_form_row(double alpha) {
    PhaseRow row;
    row.alpha = alpha;
    if (alpha > 0.5) return row;
    if (tc1_expression(alpha) >= 0.0) row.tc1_analytic = tc1_analytic(alpha);
    row.tc2_analytic = tc2_analytic(alpha);
    row.tc2_small_g = tc2_small_g(alpha);
    return row;
}

std::vector<PhaseRow> scan_phase_diagram(const std::vector<double>& alpha_grid, const TransitionSpec& spec,
                                         Exec exec) {
    for (double a : alpha_grid)
        if (!(a > 0.3 && a <= 0.55)) throw DomainError("phase scan covers alpha in (0.3, 0.55]");
    std::vector<PhaseRow> rows(alpha_grid.size());
    for_each_index(alpha_grid.size(), exec, [&](std::size_t i) {
        const double alpha = alpha_grid[i];
        PhaseRow& row = rows[i];
        row = closed_form_row(alpha);
        if (alpha >= 0.5) {
            if (alpha == 0.5) row.flags.push_back("exactly_solvable");
            return;
        }
        try {
            Transition t1 = find_tc1_numeric(alpha, spec);
            row.tc1_numeric = t1.T;
            if (!t1.T) row.flags.push_back("tc1_absent");
        } catch (const Error& e) {
            row.flags.push_back("tc1_failed");
        }
        try {
            Transition t2 = find_tc2_numeric(alpha, spec);
            row.tc2_numeric = t2.T;
            if (!t2.T) row.flags.push_back("tc2_absent");
            if (!t2.note.empty() && t2.T) row.flags.push_back("tc2_pole_check");
        } catch (const Error& e) {
            row.flags.push_back("tc2_failed");
        }
        if (row.tc1_numeric && row.tc2_numeric && *row.tc1_numeric > *row.tc2_numeric)
            row.flags.push_back("band_inverted");
    });
    return rows;
}

void write_phase_csv(std::ostream& os, const std::vector<PhaseRow>& rows) {
    os << "alpha [1],tc1_numeric [T_K],tc2_numeric [T_K],tc1_analytic [T_K],tc2_analytic [T_K],flags [-]\n";
    for (const auto& r : rows)
        os << fmt(r.alpha) << ',' << fmt(r.tc1_numeric) << ',' << fmt(r.tc2_numeric) << ',' << fmt(r.tc1_analytic)
           << ',' << fmt(r.tc2_analytic) << ',' << join(r.flags) << '\n';
}

void write_comparison_csv(std::ostream& os, const std::vector<PhaseRow>& rows) {
    os << "alpha [1],tc1_closed [T_K],tc2_closed [T_K],tc2_small_g [T_K],tc1_numeric [T_K],tc2_numeric [T_K],"
          "niba_ref [T_K]\n";
    for (const auto& r : rows)
        os << fmt(r.alpha) << ',' << fmt(r.tc1_analytic) << ',' << fmt(r.tc2_analytic) << ',' << fmt(r.tc2_small_g)
           << ',' << fmt(r.tc1_numeric) << ',' << fmt(r.tc2_numeric) << ',' << fmt(niba_tc2_reference()) << '\n';
}

void write_phase_gnuplot(std::ostream& os, const std::string& csv_name) {
    os << "set datafile separator ','\n"
          "set key top left\n"
          "set xlabel 'alpha'\n"
          "set ylabel 'T / T_K'\n"
          "set xrange [0.3:0.55]\n"
          "set yrange [0:*]\n"
          "plot '"
       << csv_name
       << "' every ::1 using 1:2 with points pt 6 title 'T_{c1} numeric', \\\n"
          "     '' every ::1 using 1:3 with points pt 6 title 'T_{c2} numeric', \\\n"
          "     '' every ::1 using 1:4 with lines title 'T_{c1} closed form', \\\n"
          "     '' every ::1 using 1:5 with lines title 'T_{c2} closed form'\n";
}

} // namespace rtrg
