#pragma once

#include <complex>
#include <cstddef>

namespace rtrg {

using cplx = std::complex<double>;

// psi(z); throws SingularityError at nonpositive integers
cplx digamma(cplx z);
// psi'(z)
cplx trigamma(cplx z);

// sum_{m<M} 1/(z+m)^2, optionally plus the Euler-Maclaurin tail of the rest
cplx trigamma_partial(cplx z, std::size_t M, bool with_tail);

// 2 pi T sum_{m<M} [i/(E + i w_m + i rate/n)]^2, w_m = pi T (2m+1).
// Brute-force oracle for the trigamma form of the flow.
cplx matsubara_sum_sq(cplx E, cplx rate, int n, double T, std::size_t M);

inline constexpr double kEulerGamma = 0.57721566490153286;

} // namespace rtrg
