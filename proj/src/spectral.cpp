#include "rtrg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rtrg/analytic.hpp"
#include "rtrg/error.hpp"

namespace rtrg {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

struct Need {
    double y;
    std::size_t row;
    int l; // y-stencil index
};

// Residuals at (x, ys[j]) from one rigid batch of columns x + l*hx.
std::vector<double> residual_column(const ModelParams& p, double x, const std::vector<double>& ys,
                                    double hx, double hy, int order, const AccuracySpec& tol) {
    const int m = order / 2;
    std::vector<cplx> offsets;
    for (int l = -m; l <= m; ++l) offsets.push_back(static_cast<double>(l) * hx);
    const std::size_t K = offsets.size();
    const std::size_t nrow = ys.size();

    std::vector<Need> needs;
    for (std::size_t j = 0; j < nrow; ++j)
        for (int l = -m; l <= m; ++l) needs.push_back({ys[j] + static_cast<double>(l) * hy, j, l});
    std::stable_sort(needs.begin(), needs.end(), [](const Need& a, const Need& b) { return a.y > b.y; });

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<cplx> center(nrow * K, cplx(nan, nan)); // Pi_1 at (x, y_j + l hy)
    std::vector<cplx> across(nrow * K, cplx(nan, nan)); // Pi_1 at (x + l hx, y_j)

    Trajectory t(p, tol, offsets);
    bool dead = false;
    try {
        t.seed(x);
    } catch (const Error&) {
        dead = true;
    }
    std::size_t q = 0;
    while (q < needs.size()) {
        const double Y = needs[q].y;
        std::size_t r = q;
        while (r < needs.size() && std::abs(needs[r].y - Y) <= 1e-13 * std::max(1.0, std::abs(Y))) ++r;
        if (!dead) {
            try {
                t.advance(cplx(x, Y));
            } catch (const FlowSingularityError&) {
                dead = true;
            } catch (const DomainError&) {
                dead = true;
            }
        }
        if (!dead) {
            for (std::size_t k = q; k < r; ++k) {
                const Need& nd = needs[k];
                for (std::size_t c = 0; c < K; ++c) {
                    if (nd.l != 0 && c != static_cast<std::size_t>(m)) continue;
                    cplx v(nan, nan);
                    try {
                        v = propagator(t.member_position(c), 1, t.rates(c));
                    } catch (const PoleProximity&) {
                    }
                    if (c == static_cast<std::size_t>(m)) center[nd.row * K + static_cast<std::size_t>(nd.l + m)] = v;
                    if (nd.l == 0) across[nd.row * K + c] = v;
                }
            }
        }
        q = r;
    }

    static const double w2[3] = {-0.5, 0.0, 0.5};
    static const double w4[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    const double* w = order == 4 ? w4 : w2;
    std::vector<double> out(nrow, ResidualMap::kSentinel);
    for (std::size_t j = 0; j < nrow; ++j) {
        double dy = 0.0, dx = 0.0;
        bool ok = true;
        for (std::size_t c = 0; c < K; ++c) {
            cplx vy = center[j * K + c], vx = across[j * K + c];
            if (!std::isfinite(vy.real()) || !std::isfinite(vx.real())) {
                ok = false;
                break;
            }
            dy += w[c] * vy.real();
            dx += w[c] * vx.imag();
        }
        if (ok) out[j] = std::abs(dy / hy + dx / hx);
    }
    return out;
}

} // namespace

double ResidualMap::x(std::size_t i) const {
    return nx > 1 ? rect.x0 + (rect.x1 - rect.x0) * static_cast<double>(i) / static_cast<double>(nx - 1) : rect.x0;
}

double ResidualMap::y(std::size_t j) const {
    return ny > 1 ? rect.y0 + (rect.y1 - rect.y0) * static_cast<double>(j) / static_cast<double>(ny - 1) : rect.y0;
}

std::size_t ResidualMap::flagged() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), kSentinel));
}

ResidualMap cr_residual_map(const ModelParams& p, const Rectangle& rect, std::size_t nx, std::size_t ny,
                            const MapOptions& opt, Exec exec) {
    if (nx < 16 || ny < 16) throw ConfigError("cr_residual_map needs a grid of at least 16 x 16");
    if (!(rect.x1 > rect.x0 && rect.y1 > rect.y0)) throw ConfigError("cr_residual_map: empty rectangle");
    if (opt.fd_order != 2 && opt.fd_order != 4) throw ConfigError("fd_order must be 2 or 4");
    ResidualMap map;
    map.rect = rect;
    map.nx = nx;
    map.ny = ny;
    map.fd_order = opt.fd_order;
    const double dx = (rect.x1 - rect.x0) / static_cast<double>(nx - 1);
    const double dy = (rect.y1 - rect.y0) / static_cast<double>(ny - 1);
    map.hx = opt.fd_step > 0.0 ? opt.fd_step : dx;
    map.hy = opt.fd_step > 0.0 ? opt.fd_step : dy;
    map.values.assign(nx * ny, ResidualMap::kSentinel);

    std::vector<double> ys(ny);
    for (std::size_t j = 0; j < ny; ++j) ys[j] = map.y(j);

    for_each_index(nx, exec, [&](std::size_t i) {
        const double x = map.x(i);
        std::vector<double> col = residual_column(p, x, ys, map.hx, map.hy, opt.fd_order, opt.tol);
        for (std::size_t j = 0; j < ny; ++j) {
            bool guarded = false;
            for (const cplx& z : opt.tol.guard_points)
                if (std::abs(cplx(x, ys[j]) - z) < opt.tol.guard_radius) guarded = true;
            map.values[j * nx + i] = guarded ? ResidualMap::kSentinel : col[j];
        }
    });

    const double frac = static_cast<double>(map.flagged()) / static_cast<double>(nx * ny);
    if (frac > opt.max_failed_fraction)
        throw MapError("cr_residual_map: flow failed at " + std::to_string(frac * 100.0) + "% of grid points");
    return map;
}

std::vector<ProfilePoint> residual_profile(const ModelParams& p, double x, double y_top, double y_bottom,
                                           std::size_t n, double fd_step, int fd_order, const AccuracySpec& tol) {
    if (n < 2) throw ConfigError("residual_profile needs n >= 2");
    if (fd_order != 2 && fd_order != 4) throw ConfigError("fd_order must be 2 or 4");
    std::vector<double> ys(n);
    for (std::size_t j = 0; j < n; ++j)
        ys[j] = y_top + (y_bottom - y_top) * static_cast<double>(j) / static_cast<double>(n - 1);
    std::vector<double> r = residual_column(p, x, ys, fd_step, fd_step, fd_order, tol);
    std::vector<ProfilePoint> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = {ys[j], r[j]};
    return out;
}

cplx zero_t_pole_seed(double g) {
    ZeroTRates r = zero_t_rates(std::abs(g));
    return {r.omega, -r.gamma1_star};
}

PoleResult find_poles(const ModelParams& p, cplx seed, const PoleOptions& opt) {
    if (!(seed.imag() < 0.0)) throw DomainError("find_poles: seed must lie in the lower half plane");
    PoleResult res;
    // f(z) = i z - Gamma_1(z) and f'(z) from the flow derivative
    auto f = [&](cplx z, cplx& df) {
        Trajectory t(p, opt.tol);
        t.seed(z.real());
        t.advance(z);
        df = I - t.derivative().dgamma1;
        return I * z - t.rates().gamma1;
    };
    auto in_domain = [&](cplx z) { return z.imag() < 0.0 && z.imag() >= -opt.tol.lambda_depth; };

    cplx z0 = seed, f0, d;
    try {
        f0 = f(z0, d);
    } catch (const FlowSingularityError& e) {
        res.note = e.what();
        return res;
    }
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        res.iterations = it;
        if (std::abs(f0) < opt.f_tol) {
            res.converged = true;
            break;
        }
        cplx dz = -f0 / d;
        if (std::abs(dz) > opt.max_newton_step) dz *= opt.max_newton_step / std::abs(dz);
        // backtrack while |f| grows; near the axis singularities full steps overshoot
        const double step = std::abs(dz);
        cplx z1, f1, d1;
        bool accepted = false;
        for (int half = 0; half < 12 && !accepted; ++half, dz *= 0.5) {
            z1 = z0 + dz;
            if (!in_domain(z1)) {
                if (half == 0 && dz.imag() < 0.0)
                    throw DomainError("find_poles: iteration left the lower half plane flow domain");
                continue;
            }
            try {
                f1 = f(z1, d1);
            } catch (const FlowSingularityError& e) {
                // at T = 0 the pole is also a logarithmic branch point of Gamma_2, and the
                // last iterates can sit closer to it than the flow can resolve
                continue;
            }
            accepted = std::abs(f1) < std::abs(f0);
        }
        if (!accepted) {
            if (step < 1e-8 && std::abs(f0) < 1e-6) {
                res.converged = true;
                res.note = "stopped at the flow branch point";
                break;
            }
            res.note = "no descent along the Newton direction";
            return res;
        }
        z0 = z1;
        f0 = f1;
        d = d1;
    }
    if (!res.converged) {
        res.note = "no convergence";
        return res;
    }
    res.raw = z0;
    Pole pole;
    pole.z = z0.real() < 0.0 ? -std::conj(z0) : z0;
    pole.omega = std::abs(z0.real());
    pole.decay = -z0.imag();
    pole.finite_frequency = pole.omega > opt.omega_tol;
    res.poles.push_back(pole);
    return res;
}

PoleResult track_pole_from(const ModelParams& p, double T0, cplx z0, double dT, const PoleOptions& opt) {
    const double T1 = p.temperature;
    if (!(dT > 0.0)) throw ConfigError("track_pole: dT must be positive");
    std::size_t n = static_cast<std::size_t>(std::ceil(std::abs(T1 - T0) / dT));
    n = std::max<std::size_t>(n, 1);
    cplx seed = z0;
    PoleResult last;
    for (std::size_t k = 1; k <= n; ++k) {
        double T = T0 + (T1 - T0) * static_cast<double>(k) / static_cast<double>(n);
        if (k == n) T = T1;
        try {
            last = find_poles(p.with_temperature(T), seed, opt);
        } catch (const DomainError& e) {
            last = PoleResult{};
            last.note = e.what();
        }
        if (last.poles.empty() || !last.poles.front().finite_frequency) return last;
        seed = last.poles.front().z;
    }
    return last;
}

PoleResult track_pole(const ModelParams& p, double dT, const PoleOptions& opt) {
    const double T1 = p.temperature;
    const cplx seed = zero_t_pole_seed(p.g);
    const double Ts = std::min(T1, 0.01);
    PoleResult first;
    try {
        first = find_poles(p.with_temperature(Ts), seed, opt);
    } catch (const DomainError& e) {
        first.note = e.what();
    }
    if (Ts == T1 || first.poles.empty() || !first.poles.front().finite_frequency) return first;
    return track_pole_from(p, Ts, first.poles.front().z, dT, opt);
}

AxisScan axis_scan(const ModelParams& p, const AxisOptions& opt) {
    const double T = p.temperature;
    const double a = 2.0 * pi * T;
    const double lam = opt.tol.start_height(p);
    const double thr = opt.stop * std::max(a, 1.0);
    const double r0 = p.initial_rate();

    AxisScan out;
    out.gamma0 = std::numeric_limits<double>::infinity();
    out.h_max = -std::numeric_limits<double>::infinity();

    auto gap = [&](const Trajectory& t) { // a*A_0 on the axis
        return t.position().imag() + 0.5 * t.rates().gamma2.real() + 0.5 * a;
    };
    auto hval = [&](const Trajectory& t) { return -t.position().imag() - t.rates().gamma1.real(); };

    Trajectory t(p, opt.tol);
    t.set(cplx(0.0, lam), {{std::log(r0), r0}});
    Trajectory prev = t;
    bool stopped = false;
    std::vector<std::pair<Trajectory, Trajectory>> brackets;

    auto obs = [&](const Trajectory& cur) {
        if (cur.position().imag() <= 0.0 && prev.position().imag() <= 0.0) {
            double hb = hval(cur);
            out.h_max = std::max(out.h_max, hb);
            if ((hval(prev) < 0.0) != (hb < 0.0)) brackets.emplace_back(prev, cur);
        } else if (cur.position().imag() <= 0.0) {
            out.h_max = std::max(out.h_max, hval(cur));
        }
        if (p.g != 0.0 && gap(cur) < thr) {
            stopped = true;
            return true;
        }
        prev = cur;
        return false;
    };
    Trajectory last = t;
    try {
        t.advance(cplx(0.0, -opt.tol.lambda_depth), [&](const Trajectory& cur) {
            last = cur;
            return obs(cur);
        });
    } catch (const FlowSingularityError&) {
        // close enough to extrapolate from the last accepted step
        if (!(p.g != 0.0 && gap(last) < 1e-2 * std::max(a, 1.0))) throw;
        t = last;
        stopped = true;
    }

    if (stopped) {
        // linear extrapolation of a*A_0 to zero; d/dy = i d/dE on the axis
        FlowDerivative d = t.derivative();
        double dG2dy = (I * d.dgamma2).real();
        double slope = 1.0 + 0.5 * dG2dy;
        double y = t.position().imag();
        double ystar = y - gap(t) / slope;
        out.gamma0 = -ystar;
        out.gamma2_at_z0 = t.rates().gamma2.real() + dG2dy * (ystar - y);
    }

    // refine each sign change of gamma - Gamma_1(-i gamma) by false position
    for (auto& [ta, tb] : brackets) {
        double ya = ta.position().imag(), yb = tb.position().imag();
        double ha = hval(ta), hb = hval(tb);
        int side = 0;
        for (int it = 0; it < 60 && std::abs(ya - yb) > 1e-13; ++it) {
            double yc = (ya * hb - yb * ha) / (hb - ha);
            Trajectory tc = ta;
            tc.advance(cplx(0.0, yc));
            double hc = hval(tc);
            if (hc == 0.0) {
                ya = yb = yc;
                break;
            }
            if ((hc < 0.0) == (ha < 0.0)) {
                ta = tc;
                ya = yc;
                ha = hc;
                if (side == -1) hb *= 0.5;
                side = -1;
            } else {
                yb = yc;
                hb = hc;
                if (side == 1) ha *= 0.5;
                side = 1;
            }
            if (std::abs(hc) < 1e-13) break;
        }
        double root = std::abs(ha) < std::abs(hb) ? ya : yb;
        if (-root < out.gamma0) out.axis_poles.push_back(-root);
    }
    std::sort(out.axis_poles.begin(), out.axis_poles.end());
    return out;
}

std::vector<double> line_crossings(const ModelParams& p, double x_off, std::size_t count,
                                   const AccuracySpec& tol) {
    const double a = 2.0 * pi * p.temperature;
    if (!(a > 0.0)) throw DomainError("line_crossings needs T > 0");
    auto reA0 = [&](const Trajectory& t) {
        return (0.5 + (-I * t.position() + 0.5 * t.rates().gamma2) / a).real();
    };

    Trajectory t(p, tol);
    t.seed(x_off);
    Trajectory prev = t;
    std::size_t m = 0;
    std::vector<std::pair<Trajectory, Trajectory>> brackets;
    try {
        t.advance(cplx(x_off, -tol.lambda_depth), [&](const Trajectory& cur) {
            double target = -static_cast<double>(m);
            if (reA0(prev) > target && reA0(cur) <= target) {
                brackets.emplace_back(prev, cur);
                if (++m >= count) return true;
            }
            prev = cur;
            return false;
        });
    } catch (const FlowSingularityError&) {
    }

    std::vector<double> ys;
    for (std::size_t k = 0; k < brackets.size(); ++k) {
        auto [ta, tb] = brackets[k];
        const double target = -static_cast<double>(k);
        double ya = ta.position().imag(), yb = tb.position().imag();
        double fa = reA0(ta) - target, fb = reA0(tb) - target;
        int side = 0;
        for (int it = 0; it < 60 && std::abs(ya - yb) > 1e-12; ++it) {
            double yc = (ya * fb - yb * fa) / (fb - fa);
            Trajectory tc = ta;
            tc.advance(cplx(x_off, yc));
            double fc = reA0(tc) - target;
            if (std::abs(fc) < 1e-13) {
                ya = yb = yc;
                break;
            }
            if ((fc > 0.0) == (fa > 0.0)) {
                ta = tc;
                ya = yc;
                fa = fc;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                yb = yc;
                fb = fc;
                if (side == 1) fa *= 0.5;
                side = 1;
            }
        }
        ys.push_back(-(std::abs(fa) < std::abs(fb) ? ya : yb));
    }
    return ys;
}

SingularityList find_imag_axis_singularities(const ModelParams& p, std::size_t count,
                                             const SingularityOptions& opt) {
    if (count < 1) throw ConfigError("find_imag_axis_singularities: count must be >= 1");
    SingularityList out;
    AxisScan ax = axis_scan(p, opt.axis);
    if (!std::isfinite(ax.gamma0)) {
        out.short_list = true;
        return out;
    }
    out.rates.push_back(ax.gamma0);
    const double T = p.temperature;
    if (count == 1) return out;
    if (T == 0.0) {
        out.short_list = true;
        return out;
    }
    const double a = 2.0 * pi * T;
    const double x_off = opt.x_off > 0.0 ? opt.x_off : std::max(1e-4, std::abs(p.g) * a);
    out.x_off = x_off;
    std::vector<double> r1 = line_crossings(p, x_off, count, opt.axis.tol);
    std::vector<double> r2 = line_crossings(p, 2.0 * x_off, count, opt.axis.tol);
    // the line's offset enters at O(x_off^2); extrapolate to the axis
    for (std::size_t m = 1; m < std::min(r1.size(), r2.size()); ++m)
        out.rates.push_back((4.0 * r1[m] - r2[m]) / 3.0);
    out.short_list = out.rates.size() < count;
    return out;
}

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::Incoherent: return "incoherent";
    case Regime::AsymptoticallyCoherent: return "asymptotically_coherent";
    case Regime::PartiallyCoherent: return "partially_coherent";
    }
    return "unknown";
}

Classification classify_regime(const SpectralFeatures& f, double omega_tol) {
    if (f.poles.empty() && f.axis_poles.empty() && f.imag_singularities.empty())
        throw ClassificationError("classify_regime: no spectral features");
    const Pole* pole = nullptr;
    for (const Pole& q : f.poles)
        if (q.omega > omega_tol && (!pole || q.decay < pole->decay)) pole = &q;
    Classification c;
    if (!pole) {
        c.regime = Regime::Incoherent;
        return c;
    }
    if (f.imag_singularities.empty()) {
        if (f.temperature > 0.0) throw ClassificationError("classify_regime: no imaginary-axis rate at T > 0");
        c.regime = Regime::AsymptoticallyCoherent;
        return c;
    }
    const double g0 = f.imag_singularities.front();
    c.regime = pole->decay < g0 ? Regime::AsymptoticallyCoherent : Regime::PartiallyCoherent;
    c.boundary = std::abs(pole->decay - g0) < 1e-4;
    return c;
}

SpectralFeatures spectral_features(const ModelParams& p, const FeatureOptions& opt) {
    SpectralFeatures f;
    f.temperature = p.temperature;
    const double omega_tol = opt.pole.omega_tol;

    std::vector<PoleResult> found;
    if (p.g > 0.0) {
        found.push_back(track_pole(p, opt.track_dT, opt.pole));
    } else {
        // no continuation anchor on this side; try a spread of seeds
        const cplx seeds[] = {zero_t_pole_seed(p.g), {0.3, -1.0}, {0.5, -0.5}, {1.0, -1.0}, {0.1, -1.5}};
        for (cplx s : seeds) {
            try {
                found.push_back(find_poles(p, s, opt.pole));
            } catch (const DomainError&) {
            }
        }
    }
    for (const PoleResult& r : found)
        for (const Pole& q : r.poles)
            if (q.omega > omega_tol) {
                bool dup = false;
                for (const Pole& e : f.poles) dup = dup || std::abs(e.z - q.z) < 1e-6;
                if (!dup) f.poles.push_back(q);
            }

    // gamma_m ~ pi T (2m + 1) + Gamma_2*/2 with Gamma_2* = O(T_K); deepen the scan to reach them
    SingularityOptions sing = opt.sing;
    const double n = static_cast<double>(std::max<std::size_t>(opt.singularities, 1));
    sing.axis.tol.lambda_depth = std::max(sing.axis.tol.lambda_depth, pi * p.temperature * (2.0 * n - 1.0) + 2.5);
    AxisScan ax = axis_scan(p, sing.axis);
    f.axis_poles = ax.axis_poles;
    if (std::isfinite(ax.gamma0)) {
        if (opt.singularities > 1 && p.temperature > 0.0)
            f.imag_singularities = find_imag_axis_singularities(p, opt.singularities, sing).rates;
        else
            f.imag_singularities = {ax.gamma0};
    }
    if (!f.poles.empty() || !f.axis_poles.empty() || !f.imag_singularities.empty())
        f.regime = classify_regime(f, omega_tol).regime;
    return f;
}

double leading_rate(const SpectralFeatures& f) {
    double r = std::numeric_limits<double>::infinity();
    for (const Pole& q : f.poles) r = std::min(r, q.decay);
    for (double g : f.axis_poles) r = std::min(r, g);
    for (double g : f.imag_singularities) r = std::min(r, g);
    return r;
}

} // namespace rtrg
