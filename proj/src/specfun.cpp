#include "rtrg/specfun.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rtrg/error.hpp"

namespace rtrg {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kAsymptotic = 20.0;

// B_{2k} for k = 1..8
constexpr double kBernoulli[8] = {1.0 / 6.0,         -1.0 / 30.0,   1.0 / 42.0,
                                  -1.0 / 30.0,       5.0 / 66.0,    -691.0 / 2730.0,
                                  7.0 / 6.0,         -3617.0 / 510.0};

void check_pole(cplx z, const char* name) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
        std::ostringstream os;
        os << name << " pole at z = " << z.real();
        throw SingularityError(os.str());
    }
}

// sin(pi z) with the real part reduced mod 2 first, so large |Re z| keeps its digits
cplx sin_pi(cplx z) {
    double xr = std::fmod(z.real(), 2.0);
    return std::sin(pi * cplx(xr, z.imag()));
}

cplx cos_pi(cplx z) {
    double xr = std::fmod(z.real(), 2.0);
    return std::cos(pi * cplx(xr, z.imag()));
}

bool use_reflection(cplx z) { return z.real() < 0.5 && std::abs(z.imag()) < kAsymptotic; }

cplx digamma_asymptotic(cplx z) {
    cplx inv2 = 1.0 / (z * z);
    cplx p = inv2;
    cplx s = 0.0;
    for (int k = 1; k <= 8; ++k) {
        s += kBernoulli[k - 1] / (2.0 * k) * p;
        p *= inv2;
    }
    return std::log(z) - 0.5 / z - s;
}

cplx trigamma_asymptotic(cplx z) {
    cplx inv = 1.0 / z;
    cplx inv2 = inv * inv;
    cplx p = inv2 * inv;
    cplx s = inv + 0.5 * inv2;
    for (int k = 1; k <= 8; ++k) {
        s += kBernoulli[k - 1] * p;
        p *= inv2;
    }
    return s;
}

} // namespace

cplx digamma(cplx z) {
    check_pole(z, "digamma");
    if (use_reflection(z))
        return digamma(1.0 - z) - pi * cos_pi(z) / sin_pi(z);
    cplx acc = 0.0;
    while (std::abs(z) < kAsymptotic) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    return acc + digamma_asymptotic(z);
}

cplx trigamma(cplx z) {
    check_pole(z, "trigamma");
    if (use_reflection(z)) {
        cplx s = sin_pi(z);
        return pi * pi / (s * s) - trigamma(1.0 - z);
    }
    cplx acc = 0.0;
    while (std::abs(z) < kAsymptotic) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    return acc + trigamma_asymptotic(z);
}

cplx trigamma_partial(cplx z, std::size_t M, bool with_tail) {
    cplx s = 0.0;
    for (std::size_t m = M; m-- > 0;) {
        cplx w = z + static_cast<double>(m);
        if (w == 0.0) throw SingularityError("trigamma_partial: term at a pole");
        s += 1.0 / (w * w);
    }
    if (with_tail) {
        cplx w = z + static_cast<double>(M);
        cplx iw = 1.0 / w;
        s += iw + 0.5 * iw * iw + iw * iw * iw / 6.0;
    }
    return s;
}

cplx matsubara_sum_sq(cplx E, cplx rate, int n, double T, std::size_t M) {
    if (!(T > 0.0)) throw DomainError("matsubara_sum_sq needs T > 0");
    if (M < 1) throw DomainError("matsubara_sum_sq needs M >= 1");
    if (n != 1 && n != 2) throw DomainError("matsubara_sum_sq: n must be 1 or 2");
    const cplx I(0.0, 1.0);
    cplx s = 0.0;
    for (std::size_t m = M; m-- > 0;) {
        double wm = pi * T * (2.0 * static_cast<double>(m) + 1.0);
        cplx den = E + I * wm + I * rate / static_cast<double>(n);
        if (std::abs(den) <= 1e-14 * (std::abs(E) + wm + std::abs(rate))) throw SingularityError("matsubara_sum_sq: summand at a pole of Pi");
        cplx p = I / den;
        s += p * p;
    }
    return 2.0 * pi * T * s;
}

} // namespace rtrg
