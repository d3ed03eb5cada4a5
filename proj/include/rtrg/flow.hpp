#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "rtrg/model.hpp"

namespace rtrg {

using cplx = std::complex<double>;

struct AccuracySpec {
    double rel = 1e-9;
    double abs = 1e-12;
    double lambda0 = 0.0;         // start height i*Lambda0; 0 means omega_c
    double lambda_depth = 2.0;    // targets need Im E >= -lambda_depth
    double re_limit = 1e7;        // and |Re E| <= re_limit
    double guard_radius = 1e-3;   // around guard_points
    double max_step_near = 0.0;   // step cap near the lower half plane; 0 means pi T/4 (0.1 at T = 0)
    double near_radius = 0.0;     // |E| below which the cap applies; 0 means 3 + 2 pi T
    double min_step = 1e-12;      // relative to max(1, |E|)
    std::size_t max_steps = 4'000'000;
    std::vector<cplx> guard_points;

    double start_height(const ModelParams& p) const { return lambda0 > 0.0 ? lambda0 : p.omega_c; }
};

enum class RhsForm { Trigamma, MatsubaraSum };

struct Rates {
    cplx gamma1;
    cplx gamma2;
};

struct FlowState {
    cplx E;
    cplx gamma1;
    cplx gamma2;
};

struct FlowDerivative {
    cplx dgamma1;
    cplx dgamma2;
};

// dGamma/dE; at T = 0 the analytic limit psi'(z) -> 1/z is used
FlowDerivative flow_rhs(const FlowState& s, const ModelParams& p);
// same with psi' replaced by the Matsubara partial sum (plus tail) of M terms
FlowDerivative flow_rhs_matsubara(const FlowState& s, const ModelParams& p, std::size_t M);

// Gamma_1, Gamma_2 at E, integrated from i*Lambda0 (horizontal leg, then vertical)
Rates evaluate_rates(cplx E, const ModelParams& p, const AccuracySpec& tol = {});
// same but down the imaginary axis first, then horizontally at Im E
Rates evaluate_rates_two_segment(cplx E, const ModelParams& p, const AccuracySpec& tol = {});

// i / (E + i Gamma_n / n); throws PoleProximity if the denominator is below guard
cplx propagator(cplx E, int n, const Rates& r, double guard = 1e-280);

// Integration state in log form: L = ln Gamma_1 avoids overflow near the
// essential singularities.
struct LogState {
    cplx L;
    cplx gamma2;
    cplx gamma1() const { return std::exp(L); }
};

// A rigid batch of points E_lead + offset_k moved together along straight
// lines with a shared adaptive DP5(4) step sequence, so that differences
// between members are smooth in the offsets.
class Trajectory {
public:
    Trajectory(const ModelParams& p, const AccuracySpec& tol, std::vector<cplx> offsets = {0.0},
               RhsForm form = RhsForm::Trigamma, std::size_t matsubara_terms = 10000);

    // start at i*Lambda0 and move horizontally to Re E = x (each member separately)
    void seed(double x);
    // start from explicit states
    void set(cplx E_lead, const std::vector<LogState>& states);

    using Observer = std::function<bool(const Trajectory&)>;
    // move the lead point to target along a straight line; observer runs after
    // every accepted step and may stop early (returns true)
    void advance(cplx target, const Observer& obs = {});

    cplx position() const { return E_; }
    cplx member_position(std::size_t k) const { return E_ + offsets_[k]; }
    std::size_t size() const { return offsets_.size(); }
    LogState state(std::size_t k = 0) const { return {y_[2 * k], y_[2 * k + 1]}; }
    Rates rates(std::size_t k = 0) const { return {std::exp(y_[2 * k]), y_[2 * k + 1]}; }
    // dGamma_1/dE and dGamma_2/dE at member k
    FlowDerivative derivative(std::size_t k = 0) const;
    std::size_t steps() const { return steps_; }
    const ModelParams& params() const { return p_; }

private:
    void rhs(cplx E_lead, const std::vector<cplx>& y, std::vector<cplx>& dy) const;
    double step_cap(cplx E) const;
    void check_target(cplx target) const;

    ModelParams p_;
    AccuracySpec tol_;
    std::vector<cplx> offsets_;
    RhsForm form_;
    std::size_t M_;
    double cap_near_;
    double r_near_;

    cplx E_{};
    std::vector<cplx> y_;
    double h_ = 0.0;
    std::size_t steps_ = 0;
    mutable std::vector<cplx> k_[7], tmp_;
};

} // namespace rtrg
