#pragma once

// Reference implementations that share no code with the library.

#include <cmath>
#include <complex>
#include <functional>

#include "doctest.h"

namespace oracle {

using cplx = std::complex<double>;

// |x - value| <= rel |value|; doctest::Approx scales eps by 1 + max(|x|, |value|)
struct RelApprox {
    double value, rel;
    friend bool operator==(double x, const RelApprox& a) { return std::abs(x - a.value) <= a.rel * std::abs(a.value); }
    friend bool operator==(const RelApprox& a, double x) { return x == a; }
};
inline RelApprox approx(double value, double rel) { return {value, rel}; }

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286;

// Hurwitz-type sum for psi'(z): direct terms, then Euler-Maclaurin with
// three Bernoulli corrections at w = z + M.
inline cplx trigamma(cplx z, int M = 2000) {
    cplx s = 0.0;
    for (int m = 0; m < M; ++m) s += 1.0 / ((z + double(m)) * (z + double(m)));
    cplx w = z + double(M);
    cplx w2 = w * w;
    s += 1.0 / w + 1.0 / (2.0 * w2) + 1.0 / (6.0 * w2 * w) - 1.0 / (30.0 * w2 * w2 * w) +
         1.0 / (42.0 * w2 * w2 * w2 * w);
    return s;
}

// psi(z) = -gamma + sum_m [1/(m+1) - 1/(m+z)], tail by Euler-Maclaurin
inline cplx digamma(cplx z, int M = 2000) {
    cplx s = -euler_gamma;
    for (int m = 0; m < M; ++m) s += 1.0 / double(m + 1) - 1.0 / (double(m) + z);
    // remaining sum_{m>=M} [1/(m+1) - 1/(m+z)] ~ (z-1) [1/w + ...] with w = M + z
    cplx w = double(M) + z;
    double u = double(M) + 1.0;
    s += std::log(w) - std::log(u) - 0.5 / w + 0.5 / u - 1.0 / (12.0 * w * w) + 1.0 / (12.0 * u * u);
    return s;
}

// Kondo scale from (alpha, Delta, omega_c)
inline double kondo(double alpha, double delta, double omega_c) {
    return delta * std::pow(delta / omega_c, alpha / (1.0 - alpha));
}

// Delta such that kondo(...) = 1, by bisection in log Delta
inline double delta_for_unit_kondo(double alpha, double omega_c) {
    double lo = -10.0, hi = 40.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (kondo(alpha, std::exp(mid), omega_c) > 1.0 ? hi : lo) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

// closed-form T = 0 rate Gamma_1(E) = [(-iE + Gamma_2/2)]^{-g}, solved together with
// Gamma_2 = Gamma_1 on the positive imaginary axis by fixed point (T_K = 1)
inline double zero_t_rate_on_axis(double y, double g, double pi_T = 0.0) {
    double G = 1.0;
    for (int it = 0; it < 500; ++it) {
        double next = std::pow(y + pi_T + 0.5 * G, -g);
        if (std::abs(next - G) < 1e-15) return next;
        G = next;
    }
    return G;
}

// fixed-step classical RK4 for a complex 2-vector, used as a flow oracle
template <class Rhs>
void rk4(cplx& a, cplx& b, cplx E0, cplx E1, int n, Rhs rhs) {
    cplx h = (E1 - E0) / double(n);
    cplx E = E0;
    for (int i = 0; i < n; ++i) {
        cplx ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
        rhs(E, a, b, ka1, kb1);
        rhs(E + 0.5 * h, a + 0.5 * h * ka1, b + 0.5 * h * kb1, ka2, kb2);
        rhs(E + 0.5 * h, a + 0.5 * h * ka2, b + 0.5 * h * kb2, ka3, kb3);
        rhs(E + h, a + h * ka3, b + h * kb3, ka4, kb4);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        E += h;
    }
}

} // namespace oracle

namespace doctest {
template <> struct StringMaker<oracle::RelApprox> {
    static String convert(const oracle::RelApprox& a) {
        return (toString(a.value) + " +- " + toString(a.rel * 100.0) + "%");
    }
};
} // namespace doctest
