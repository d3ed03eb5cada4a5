#pragma once

#include <complex>
#include <cstddef>

#include "rtrg/model.hpp"

namespace rtrg {

using cplx = std::complex<double>;

// T_K (2 pi T)^{-g} exp(-g psi(1/2 + (-iE + gamma2/2)/(2 pi T)))
cplx gamma1_closed_form(cplx E, cplx gamma2, const ModelParams& p);

struct ZeroTRates {
    double gamma1_star = 1.0; // pole decay rate
    double omega = 0.0;       // pole frequency
    double gamma2_star = 1.0;
};

// decay = Re w, frequency = |Im w|, w = exp((i pi + ln 2) g/(1+g))
ZeroTRates zero_t_rates(double g);

struct FixedPointSpec {
    double damping = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 500;
    double s_min = -40.0; // quadrature in s = ln x
    double s_max = 80.0;
    double ds = 0.01;
};

struct FixedPointResult {
    double value = 0.0;
    std::size_t iterations = 0;
};

// Gamma_2* = 2 pi T g int_0^inf u(x) psi'(x + u(x) - Gamma_2*/(4 pi T)) dx,
// u(x) = (T_K/2 pi T)^{1+g} exp(-g psi(x))
FixedPointResult gamma2_star_finite_T(const ModelParams& p, const FixedPointSpec& fp = {});

// (Gamma_1* - Gamma_2*/2)/pi from the zero-T rates, without the sign check
double tc1_expression(double alpha);
// throws DomainError where the expression is negative (no partially coherent phase)
double tc1_analytic(double alpha);
// closed form with the Euler constant
double tc2_analytic(double alpha);
// (T_K/2 pi)(1 + 4 sqrt(1/2 - alpha)), small-g form
double tc2_small_g(double alpha);
// T_K/pi, the NIBA limit quoted for comparison
double niba_tc2_reference();

} // namespace rtrg
