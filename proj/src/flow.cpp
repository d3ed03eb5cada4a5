#include "rtrg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rtrg/error.hpp"
#include "rtrg/specfun.hpp"

namespace rtrg {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// above this Re L the Gamma_2 source uses its large-Gamma_1 asymptotic form
constexpr double kLogOverflow = 600.0;
// beyond this Re L the trajectory is treated as having hit a singularity
constexpr double kLogBlowup = 1e6;

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

cplx trig(cplx z, RhsForm form, std::size_t M) {
    return form == RhsForm::Trigamma ? trigamma(z) : trigamma_partial(z, M, true);
}

// dL/dE and dGamma_2/dE for one point
void log_rhs(const ModelParams& p, RhsForm form, std::size_t M, cplx E, cplx L, cplx G2, cplx& dL,
             cplx& dG2) {
    const double g = p.g;
    if (g == 0.0) {
        dL = 0.0;
        dG2 = 0.0;
        return;
    }
    const double T = p.temperature;
    if (T == 0.0) {
        cplx den0 = E + 0.5 * I * G2;
        if (den0 == 0.0) throw FlowSingularityError("flow: zero-T branch point", E);
        dL = -g / den0;
        if (L.real() > 0.0)
            dG2 = -g / (E * std::exp(-L) + I);
        else {
            cplx G1 = std::exp(L);
            dG2 = -g * G1 / (E + I * G1);
        }
        return;
    }
    const double a = 2.0 * pi * T;
    const cplx pref = I * g / a;
    try {
        cplx A0 = 0.5 + (-I * E + 0.5 * G2) / a;
        dL = pref * trig(A0, form, M);
        cplx F;
        if (L.real() > kLogOverflow) {
            F = a / (1.0 + (0.5 * a - I * E) * std::exp(-L));
        } else {
            cplx G1 = std::exp(L);
            cplx A1 = 0.5 + (-I * E + G1) / a;
            F = G1 * trig(A1, form, M);
        }
        dG2 = pref * F;
    } catch (const SingularityError&) {
        throw FlowSingularityError("flow: trigamma pole on the path", E);
    }
}

} // namespace

FlowDerivative flow_rhs(const FlowState& s, const ModelParams& p) {
    if (s.gamma1 == 0.0) return {0.0, 0.0};
    cplx dL, dG2;
    log_rhs(p, RhsForm::Trigamma, 0, s.E, std::log(s.gamma1), s.gamma2, dL, dG2);
    return {s.gamma1 * dL, dG2};
}

FlowDerivative flow_rhs_matsubara(const FlowState& s, const ModelParams& p, std::size_t M) {
    if (s.gamma1 == 0.0) return {0.0, 0.0};
    cplx dL, dG2;
    log_rhs(p, RhsForm::MatsubaraSum, M, s.E, std::log(s.gamma1), s.gamma2, dL, dG2);
    return {s.gamma1 * dL, dG2};
}

Trajectory::Trajectory(const ModelParams& p, const AccuracySpec& tol, std::vector<cplx> offsets,
                       RhsForm form, std::size_t matsubara_terms)
    : p_(p), tol_(tol), offsets_(std::move(offsets)), form_(form), M_(matsubara_terms) {
    if (offsets_.empty()) offsets_.push_back(0.0);
    const double T = p_.temperature;
    cap_near_ = tol_.max_step_near > 0.0 ? tol_.max_step_near : (T > 0.0 ? pi * T / 4.0 : 0.1);
    r_near_ = tol_.near_radius > 0.0 ? tol_.near_radius : 3.0 + 2.0 * pi * T;
    const std::size_t n = 2 * offsets_.size();
    y_.assign(n, 0.0);
    for (auto& k : k_) k.assign(n, 0.0);
    tmp_.assign(n, 0.0);
}

void Trajectory::rhs(cplx E_lead, const std::vector<cplx>& y, std::vector<cplx>& dy) const {
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
        log_rhs(p_, form_, M_, E_lead + offsets_[k], y[2 * k], y[2 * k + 1], dy[2 * k], dy[2 * k + 1]);
        if (!std::isfinite(dy[2 * k].real()) || !std::isfinite(dy[2 * k].imag()) ||
            !std::isfinite(dy[2 * k + 1].real()) || !std::isfinite(dy[2 * k + 1].imag()))
            throw FlowSingularityError("flow: non-finite right-hand side", E_lead + offsets_[k]);
    }
}

FlowDerivative Trajectory::derivative(std::size_t k) const {
    cplx dL, dG2;
    log_rhs(p_, form_, M_, member_position(k), y_[2 * k], y_[2 * k + 1], dL, dG2);
    return {std::exp(y_[2 * k]) * dL, dG2};
}

double Trajectory::step_cap(cplx E) const {
    // lower bound on the distance to the nonanalytic region
    double d = std::max(E.imag(), std::abs(E) - r_near_);
    return std::max(cap_near_, 0.1 * d);
}

void Trajectory::check_target(cplx target) const {
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
        cplx Et = target + offsets_[k];
        if (Et.imag() < -tol_.lambda_depth - 1e-12 || std::abs(Et.real()) > tol_.re_limit) {
            std::ostringstream os;
            os << "flow target " << Et << " outside the flow domain";
            throw DomainError(os.str());
        }
        for (const cplx& z : tol_.guard_points)
            if (std::abs(Et - z) < tol_.guard_radius)
                throw FlowSingularityError("flow target inside a guard disk", Et);
    }
}

void Trajectory::set(cplx E_lead, const std::vector<LogState>& states) {
    if (states.size() != offsets_.size()) throw DomainError("Trajectory::set: state count mismatch");
    E_ = E_lead;
    for (std::size_t k = 0; k < states.size(); ++k) {
        y_[2 * k] = states[k].L;
        y_[2 * k + 1] = states[k].gamma2;
    }
    h_ = 0.0;
}

void Trajectory::seed(double x) {
    const double lam = tol_.start_height(p_);
    const double r0 = p_.initial_rate();
    const LogState ic{std::log(r0), r0};
    std::vector<LogState> states;
    for (const cplx& off : offsets_) {
        Trajectory single(p_, tol_, {0.0}, form_, M_);
        single.set(cplx(0.0, lam), {ic});
        single.advance(cplx(x, lam) + off);
        states.push_back(single.state());
        steps_ += single.steps();
    }
    set(cplx(x, lam), states);
}

void Trajectory::advance(cplx target, const Observer& obs) {
    check_target(target);
    const cplx start = E_;
    const cplx D = target - start;
    const double dist = std::abs(D);
    if (dist == 0.0) return;
    const cplx u = D / dist;
    const std::size_t n = y_.size();

    auto at = [&](double s) { return s >= dist ? target : start + s * u; };
    auto deriv = [&](double s, const std::vector<cplx>& y, std::vector<cplx>& dy) {
        rhs(at(s), y, dy);
        for (auto& v : dy) v *= u;
    };

    double s = 0.0;
    double h = h_ > 0.0 ? h_ : std::min(step_cap(E_), 1e-3 * std::max(1.0, std::abs(E_)));
    deriv(0.0, y_, k_[0]);
    std::vector<cplx> y5(n);

    while (s < dist) {
        cplx Ecur = at(s);
        h = std::min(h, step_cap(Ecur));
        const double planned = h;
        bool last = false;
        if (h >= (dist - s) * (1.0 - 1e-12)) {
            h = dist - s;
            last = true;
        }
        const double hmin = tol_.min_step * std::max(1.0, std::abs(Ecur));
        if (h < hmin && !last) throw FlowSingularityError("flow: step size underflow", Ecur);
        if (steps_ > tol_.max_steps) throw FlowSingularityError("flow: step budget exhausted", Ecur);

        double err = 0.0;
        bool failed = false;
        try {
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * a21 * k_[0][i];
            deriv(s + c2 * h, tmp_, k_[1]);
            for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
            deriv(s + c3 * h, tmp_, k_[2]);
            for (std::size_t i = 0; i < n; ++i)
                tmp_[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
            deriv(s + c4 * h, tmp_, k_[3]);
            for (std::size_t i = 0; i < n; ++i)
                tmp_[i] = y_[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] + a54 * k_[3][i]);
            deriv(s + c5 * h, tmp_, k_[4]);
            for (std::size_t i = 0; i < n; ++i)
                tmp_[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                       a64 * k_[3][i] + a65 * k_[4][i]);
            deriv(last ? dist : s + h, tmp_, k_[5]);
            for (std::size_t i = 0; i < n; ++i)
                y5[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                     a75 * k_[4][i] + a76 * k_[5][i]);
            deriv(last ? dist : s + h, y5, k_[6]);
            for (std::size_t i = 0; i < n; ++i) {
                cplx e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                              e6 * k_[5][i] + e7 * k_[6][i]);
                double mag = std::max(std::abs(y_[i]), std::abs(y5[i]));
                if (i % 2 == 0) mag = std::max(1.0, mag); // L: absolute error = relative error of Gamma_1
                double sc = tol_.abs + tol_.rel * mag;
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) failed = true;
        } catch (const FlowSingularityError&) {
            failed = true;
        }

        if (failed) {
            if (last && h < hmin) throw FlowSingularityError("flow: singular right-hand side", Ecur);
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            s = last ? dist : s + h;
            y_.swap(y5);
            std::swap(k_[0], k_[6]);
            E_ = at(s);
            ++steps_;
            for (std::size_t k = 0; k < offsets_.size(); ++k)
                if (y_[2 * k].real() > kLogBlowup) throw FlowSingularityError("flow: Gamma_1 diverges", E_);
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            double hn = h * std::clamp(fac, 0.2, 5.0);
            // a truncated final step says nothing about the next one
            h_ = last ? std::max(std::min(hn, planned), 0.2 * planned) : hn;
            h = hn;
            if (obs && obs(*this)) return;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
}

Rates evaluate_rates(cplx E, const ModelParams& p, const AccuracySpec& tol) {
    const double lam = tol.start_height(p);
    if (E == cplx(0.0, lam)) return {p.initial_rate(), p.initial_rate()};
    Trajectory t(p, tol);
    t.seed(E.real());
    t.advance(E);
    return t.rates();
}

Rates evaluate_rates_two_segment(cplx E, const ModelParams& p, const AccuracySpec& tol) {
    const double lam = tol.start_height(p);
    const double r0 = p.initial_rate();
    Trajectory t(p, tol);
    t.set(cplx(0.0, lam), {{std::log(r0), r0}});
    t.advance(cplx(0.0, E.imag()));
    t.advance(E);
    return t.rates();
}

cplx propagator(cplx E, int n, const Rates& r, double guard) {
    if (n != 1 && n != 2) throw DomainError("propagator: n must be 1 or 2");
    cplx G = n == 1 ? r.gamma1 : r.gamma2;
    cplx den = E + I * G / static_cast<double>(n);
    if (!(std::abs(den) > guard)) throw PoleProximity("propagator: denominator below guard", E);
    return I / den;
}

} // namespace rtrg
