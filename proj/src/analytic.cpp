#include "rtrg/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rtrg/error.hpp"
#include "rtrg/specfun.hpp"

namespace rtrg {

namespace {

constexpr double pi = std::numbers::pi;

// pi g / sin(pi g) with the removable point at g = 0
double pig_over_sin(double g) {
    double x = pi * g;
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return x / std::sin(x);
}

double alpha_to_g(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    return 1.0 - 2.0 * alpha;
}

} // namespace

cplx gamma1_closed_form(cplx E, cplx gamma2, const ModelParams& p) {
    const double T = p.temperature;
    if (!(T > 0.0)) throw DomainError("gamma1_closed_form needs T > 0");
    const double a = 2.0 * pi * T;
    const double tk = p.kondo_scale;
    const double tk_tilde = tk * std::pow(a / tk, -p.g);
    const cplx I(0.0, 1.0);
    return tk_tilde * std::exp(-p.g * digamma(0.5 + (-I * E + 0.5 * gamma2) / a));
}

ZeroTRates zero_t_rates(double g) {
    if (!(g >= 0.0 && g < 1.0)) throw DomainError("zero_t_rates needs 0 <= g < 1, got " + std::to_string(g));
    const cplx w = std::exp(cplx(std::log(2.0), pi) * (g / (1.0 + g)));
    ZeroTRates r;
    r.gamma1_star = w.real();
    r.omega = std::abs(w.imag());
    r.gamma2_star = 2.0 * std::pow(0.5 * pig_over_sin(g), 1.0 / (1.0 + g));
    return r;
}

FixedPointResult gamma2_star_finite_T(const ModelParams& p, const FixedPointSpec& fp) {
    const double T = p.temperature;
    const double g = p.g;
    if (!(T > 0.0)) throw DomainError("gamma2_star_finite_T needs T > 0");
    if (!(g > 0.0 && g < 1.0)) throw DomainError("gamma2_star_finite_T needs 0 < g < 1");
    const double a = 2.0 * pi * T;
    const double K = std::pow(p.kondo_scale / a, 1.0 + g);
    const std::size_t n = static_cast<std::size_t>(std::ceil((fp.s_max - fp.s_min) / fp.ds));
    const double ds = (fp.s_max - fp.s_min) / static_cast<double>(n);

    // u(x) depends only on x, so tabulate it once
    std::vector<double> xs(n + 1), us(n + 1);
    std::vector<bool> huge(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double x = std::exp(fp.s_min + ds * static_cast<double>(k));
        double expo = -g * digamma(cplx(x, 0.0)).real();
        xs[k] = x;
        huge[k] = expo > 600.0;
        us[k] = huge[k] ? 0.0 : K * std::exp(expo);
    }
    const double X = xs[n];
    // x >> 1: u ~ K x^{-g}, psi' ~ 1/x
    const double tail = a * K * std::pow(X, -g);

    auto rhs = [&](double G2) {
        const double c = G2 / (2.0 * a);
        double s = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            double up;
            if (huge[k]) {
                up = 1.0;
            } else {
                cplx z(xs[k] + us[k] - c, 0.0);
                up = us[k] * trigamma(z).real();
            }
            double w = (k == 0 || k == n) ? 0.5 : 1.0;
            s += w * up * xs[k];
        }
        return a * g * s * ds + tail;
    };

    double G = zero_t_rates(g).gamma2_star;
    double d = fp.damping;
    double prev_res = 0.0;
    for (std::size_t it = 1; it <= fp.max_iter; ++it) {
        double F = rhs(G);
        double res = F - G;
        if (!std::isfinite(F)) throw FixedPointError("gamma2_star_finite_T: non-finite iterate");
        if (std::abs(res) < fp.tol) return {F, it};
        if (it > 1 && res * prev_res < 0.0 && std::abs(res) > 0.5 * std::abs(prev_res)) d *= 0.5;
        prev_res = res;
        G += d * res;
    }
    throw FixedPointError("gamma2_star_finite_T: no convergence in " + std::to_string(fp.max_iter) + " iterations");
}

double tc1_expression(double alpha) {
    const double g = alpha_to_g(alpha);
    if (g < 0.0) throw DomainError("tc1 needs alpha <= 1/2");
    ZeroTRates r = zero_t_rates(g);
    return (r.gamma1_star - 0.5 * r.gamma2_star) / pi;
}

double tc1_analytic(double alpha) {
    double t = tc1_expression(alpha);
    if (t < 0.0) throw DomainError("tc1_analytic: alpha below the partially coherent threshold");
    return t;
}

double tc2_analytic(double alpha) {
    const double g = alpha_to_g(alpha);
    if (g < 0.0) throw DomainError("tc2_analytic: no transition for alpha > 1/2");
    const double r = std::sqrt(2.0 * g + g * g);
    return 1.0 / (2.0 * pi) * std::exp((g * (1.0 + kEulerGamma) + r) / (1.0 + g)) *
           std::pow(1.0 + g + r, 1.0 / (1.0 + g));
}

double tc2_small_g(double alpha) {
    const double g = alpha_to_g(alpha);
    if (g < 0.0) throw DomainError("tc2_small_g: no transition for alpha > 1/2");
    return 1.0 / (2.0 * pi) * (1.0 + 4.0 * std::sqrt(0.5 - alpha));
}

double niba_tc2_reference() { return 1.0 / pi; }

} // namespace rtrg
