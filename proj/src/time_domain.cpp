#include "rtrg/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rtrg/error.hpp"

namespace rtrg {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// M_k = int_0^H s^k exp(-i w s) ds, k = 0..3
void moments(double w, double H, cplx M[4]) {
    const double z = w * H;
    if (std::abs(z) < 1.0) {
        for (int k = 0; k < 4; ++k) {
            cplx term = 1.0, s = 0.0;
            for (int n = 0; n < 30; ++n) {
                s += term / static_cast<double>(n + k + 1);
                term *= cplx(0.0, -z) / static_cast<double>(n + 1);
            }
            M[k] = std::pow(H, k + 1) * s;
        }
        return;
    }
    const cplx e = std::polar(1.0, -z);
    const cplx iw(0.0, w);
    M[0] = (1.0 - e) / iw;
    double Hk = 1.0;
    for (int k = 1; k < 4; ++k) {
        Hk *= H;
        M[k] = (static_cast<double>(k) * M[k - 1] - Hk * e) / iw;
    }
}

// int_{xa}^{xb} exp(-i t x) f(x) dx with f cubic Hermite from values and slopes
cplx filon_panel(double t, double xa, double xb, cplx f0, cplx f1, cplx d0, cplx d1) {
    const double H = xb - xa;
    const cplx q = (f1 - f0) / H;
    const cplx c2 = (3.0 * q - 2.0 * d0 - d1) / H;
    const cplx c3 = (d0 + d1 - 2.0 * q) / (H * H);
    cplx M[4];
    moments(t, H, M);
    return std::polar(1.0, -t * xa) * (f0 * M[0] + d0 * M[1] + c2 * M[2] + c3 * M[3]);
}

double cubic_root(const double* ts, const double* ps, std::size_t n, double a, double b) {
    auto eval = [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double l = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) l *= (t - ts[j]) / (ts[i] - ts[j]);
            s += ps[i] * l;
        }
        return s;
    };
    double fa = eval(a);
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        double fm = eval(m);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
    if (n < 2) return {t0};
    std::vector<double> ts(n);
    for (std::size_t k = 0; k < n; ++k) ts[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
    return ts;
}

LineSamples sample_line(const ModelParams& p, double shift, const std::vector<double>& xs, std::size_t chunks,
                        const AccuracySpec& tol, Exec exec) {
    LineSamples out;
    out.x = xs;
    out.pi.assign(xs.size(), 0.0);
    out.dpi.assign(xs.size(), 0.0);
    if (xs.empty()) return out;
    chunks = std::clamp<std::size_t>(chunks, 1, xs.size());
    const std::size_t n = xs.size();

    for_each_index(chunks, exec, [&](std::size_t c) {
        const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        if (lo >= hi) return;
        Trajectory t(p, tol);
        t.seed(xs[lo]);
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx E(xs[k], shift);
            t.advance(E);
            Rates r = t.rates();
            cplx P = propagator(E, 1, r);
            cplx dG1 = t.derivative().dgamma1;
            out.pi[k] = P;
            out.dpi[k] = I * (1.0 + I * dG1) * P * P;
        }
    });
    return out;
}

RelaxationTrace invert_laplace(const ModelParams& p, const std::vector<double>& times, const QuadSpec& quad,
                               Exec exec) {
    if (times.empty()) throw ConfigError("invert_laplace: empty time grid");
    if (!std::is_sorted(times.begin(), times.end())) throw ConfigError("invert_laplace: time grid must ascend");
    if (times.front() < 10.0 / p.omega_c * (1.0 - 1e-12))
        throw DomainError("invert_laplace: times below 10/omega_c are outside the universal window");
    const double t_max = times.back();
    double gl = quad.gamma_lead ? *quad.gamma_lead : leading_rate(spectral_features(p));
    double c = quad.shift;
    if (c == 0.0) c = std::isfinite(gl) ? -quad.shift_factor * gl : 1e-3;
    double gref = evaluate_rates(0.0, p, quad.tol).gamma1.real();
    if (std::isfinite(gl)) gref = std::max(gref, gl);
    if (!(c > -gref)) throw ConfigError("invert_laplace: contour lies below the reference pole");

    double h = quad.step;
    if (h <= 0.0) {
        h = pi / (4.0 * t_max);
        // trapezoid error ~ exp(-2 pi d / h) for a feature at distance d below the line
        if (std::isfinite(gl) && gl + c > 0.0) h = std::min(h, (gl + c) / 4.5);
    }
    const std::size_t N = static_cast<std::size_t>(std::ceil(quad.e_max / h));
    h = quad.e_max / static_cast<double>(N);

    const double X = quad.x_far > 0.0 ? quad.x_far : 100.0 * p.omega_c;
    std::vector<double> tail;
    for (double x = quad.e_max; x < X;) {
        x = std::min(x * quad.panel_ratio, X);
        tail.push_back(x);
    }
    std::vector<double> xs;
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) xs.push_back(-*it);
    for (std::size_t k = 0; k <= 2 * N; ++k)
        xs.push_back(-quad.e_max + h * static_cast<double>(k));
    for (double x : tail) xs.push_back(x);
    const std::size_t nt = tail.size();
    const std::size_t core0 = nt, core1 = nt + 2 * N; // inclusive core range

    LineSamples s = sample_line(p, c, xs, quad.chunks, quad.tol, exec);
    std::vector<cplx> f(xs.size()), fp(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        cplx den = cplx(xs[k], c) + I * gref;
        f[k] = s.pi[k] - I / den;
        fp[k] = s.dpi[k] + I / (den * den);
    }

    RelaxationTrace tr;
    tr.times = times;
    tr.contour_shift = c;
    tr.window = quad.e_max;
    tr.step = h;
    tr.gamma_ref = gref;
    tr.gamma_lead = gl;
    // beyond X the first two integration-by-parts terms are kept; the next one is the residual
    const std::size_t nl = xs.size() - 1;
    const double t0 = times.front();
    double decay = -std::numeric_limits<double>::infinity();
    for (std::size_t k : {std::size_t{0}, nl}) {
        std::size_t k2 = k == 0 ? 1 : nl - 1;
        if (std::abs(f[k]) == 0.0) continue;
        decay = std::max(decay, std::log(std::abs(f[k]) / std::abs(f[k2])) / std::log(std::abs(xs[k] / xs[k2])));
        tr.tail_estimate = std::max(tr.tail_estimate, std::abs(fp[k]) / (t0 * t0));
    }
    if (!(decay < -1.5) || tr.tail_estimate > quad.max_tail)
        throw WindowError("invert_laplace: integrand tail does not decay inside the window", tr.tail_estimate);

    double S = 0.0;
    for (std::size_t k = core0; k <= core1; ++k) S += std::abs(f[k]) * h;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        if (k < core0 || k >= core1) S += std::abs(f[k]) * (xs[k + 1] - xs[k]);
    S /= 2.0 * pi;

    const std::size_t nT = times.size();
    tr.values.assign(nT, 0.0);
    tr.imag.assign(nT, 0.0);
    tr.noise.assign(nT, 0.0);
    for_each_index(nT, exec, [&](std::size_t j) {
        const double t = times[j];
        // uniform core grid: advance the phase by a fixed rotation, re-anchored every 256 samples
        cplx core = 0.0;
        const cplx rot = std::polar(1.0, -t * h);
        cplx ph;
        for (std::size_t k = core0; k <= core1; ++k) {
            ph = (k - core0) % 256 == 0 ? std::polar(1.0, -t * xs[k]) : ph * rot;
            double w = (k == core0 || k == core1) ? 0.5 : 1.0;
            core += w * ph * f[k];
        }
        core *= h;
        auto Gp = [&](std::size_t k) { return std::polar(1.0, -t * xs[k]) * (fp[k] - I * t * f[k]); };
        core -= h * h / 12.0 * (Gp(core1) - Gp(core0));

        cplx tails = 0.0;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            if (k >= core0 && k < core1) continue;
            tails += filon_panel(t, xs[k], xs[k + 1], f[k], f[k + 1], fp[k], fp[k + 1]);
        }
        // beyond +-X: two terms of integration by parts
        const cplx kk(0.0, -t);
        const std::size_t last = xs.size() - 1;
        tails += -std::exp(kk * xs[last]) * (f[last] / kk - fp[last] / (kk * kk));
        tails += std::exp(kk * xs[0]) * (f[0] / kk - fp[0] / (kk * kk));

        cplx P = std::exp(c * t) / (2.0 * pi) * (core + tails) + std::exp(-gref * t);
        tr.values[j] = P.real();
        tr.imag[j] = P.imag();
        tr.noise[j] = std::exp(c * t) * 10.0 * quad.tol.rel * S + 1e-16 * std::exp(-gref * t);
    });
    return tr;
}

std::vector<double> trace_zeros(const RelaxationTrace& tr, double t_start, double omega) {
    const auto& t = tr.times;
    const auto& P = tr.values;
    const std::size_t n = t.size();
    if (omega > 0.0) {
        double dt = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) dt = std::max(dt, t[k + 1] - t[k]);
        if (dt > 2.0 * pi / (8.0 * omega))
            throw ResolutionError("trace too coarse: fewer than 8 samples per oscillation period");
    }
    auto ok = [&](std::size_t k) { return std::abs(P[k]) > 100.0 * tr.noise[k]; };
    std::vector<double> zs;
    std::size_t prev = n;
    for (std::size_t k = 0; k < n; ++k) {
        if (t[k] < t_start || !ok(k)) continue;
        if (prev != n && (P[prev] < 0.0) != (P[k] < 0.0)) {
            std::size_t a = prev > 0 ? prev - 1 : prev;
            std::size_t b = std::min(k + 1, n - 1);
            double ts[4], ps[4];
            std::size_t m = 0;
            for (std::size_t i = a; i <= b && m < 4; ++i) {
                ts[m] = t[i];
                ps[m] = P[i];
                ++m;
            }
            zs.push_back(cubic_root(ts, ps, m, t[prev], t[k]));
        }
        prev = k;
    }
    return zs;
}

int count_sign_changes(const RelaxationTrace& tr, double t_start, double omega) {
    return static_cast<int>(trace_zeros(tr, t_start, omega).size());
}

double fit_decay_rate(const RelaxationTrace& tr, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        double t = tr.times[k];
        if (t < t0 || t > t1 || !(std::abs(tr.values[k]) > 100.0 * tr.noise[k])) continue;
        double y = std::log(std::abs(tr.values[k]));
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n;
    }
    if (n < 2) throw ResolutionError("fit_decay_rate: fewer than two usable samples");
    double dn = static_cast<double>(n);
    return -(dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

TraceClassification classify_from_trace(const RelaxationTrace& tr, const TraceClassifyOptions& opt) {
    TraceClassification out;
    const auto& t = tr.times;
    const auto& P = tr.values;
    if (t.size() < 8) {
        out.reason = "trace too short";
        return out;
    }
    std::size_t kend = 0;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (std::abs(P[k]) > 100.0 * tr.noise[k]) kend = k;
    out.t_end = t[kend];
    if (opt.gamma_min && out.t_end < 5.0 / *opt.gamma_min) {
        out.reason = "trace ends before 5 decay times of the leading rate";
        return out;
    }
    std::vector<double> zs = trace_zeros(tr, opt.t_start);
    out.zeros = static_cast<int>(zs.size());
    if (zs.empty()) {
        out.regime = Regime::Incoherent;
        return out;
    }
    const double tau = zs.size() >= 2 ? zs.back() - zs[zs.size() - 2] : 2.0 * zs.front();
    out.half_period = tau;
    const double tail = out.t_end - zs.back();
    if (tail <= 1.25 * tau) {
        out.regime = Regime::AsymptoticallyCoherent;
        return out;
    }
    if (tail >= 2.0 * tau) {
        bool mono = true;
        std::size_t prev = t.size();
        for (std::size_t k = 0; k <= kend; ++k) {
            if (t[k] < zs.back() + tau) continue;
            if (prev != t.size() && std::abs(P[k]) > std::abs(P[prev]) * (1.0 + 1e-9)) mono = false;
            prev = k;
        }
        if (mono) {
            out.regime = Regime::PartiallyCoherent;
            return out;
        }
        out.reason = "|P| not monotone after the last zero";
        return out;
    }
    out.reason = "last zero too close to the end of the resolved window to decide";
    return out;
}

} // namespace rtrg
