#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rtrg/flow.hpp"
#include "rtrg/kernels.hpp"
#include "rtrg/model.hpp"
#include "rtrg/spectral.hpp"

namespace rtrg {

struct QuadSpec {
    double e_max = 200.0;      // trapezoid core |Re E| <= e_max
    double step = 0.0;         // 0: min(pi/(4 t_max), distance to the leading feature / 4.5)
    double shift = 0.0;        // Im E of the contour; 0: -shift_factor * leading decay rate
    double shift_factor = 0.95;
    double x_far = 0.0;        // end of the Filon tail; 0: 100 omega_c
    double panel_ratio = 1.02; // geometric tail panels
    std::size_t chunks = 64;   // independent sweep segments per half line
    double max_tail = 1e-6;    // window error above this neglected-tail bound
    std::optional<double> gamma_lead;
    AccuracySpec tol;
};

struct RelaxationTrace {
    std::vector<double> times;
    std::vector<double> values; // Re P(t)
    std::vector<double> imag;   // Im P(t), zero up to quadrature error
    std::vector<double> noise;  // error floor estimate per sample
    double contour_shift = 0.0;
    double window = 0.0;
    double step = 0.0;
    double gamma_ref = 0.0;
    double gamma_lead = 0.0;
    double tail_estimate = 0.0;
};

// Pi_1 and dPi_1/dE on the line Im E = shift at the given real parts
struct LineSamples {
    std::vector<double> x;
    std::vector<cplx> pi;
    std::vector<cplx> dpi;
};
LineSamples sample_line(const ModelParams& p, double shift, const std::vector<double>& xs, std::size_t chunks,
                        const AccuracySpec& tol, Exec exec = Exec::Parallel);

RelaxationTrace invert_laplace(const ModelParams& p, const std::vector<double>& times, const QuadSpec& quad = {},
                               Exec exec = Exec::Parallel);

std::vector<double> uniform_times(double t0, double t1, std::size_t n);

// zeros of P(t) for t >= t_start, refined on a local cubic; samples under
// 100x the noise floor are ignored. omega > 0 enables the resolution check.
std::vector<double> trace_zeros(const RelaxationTrace& tr, double t_start, double omega = 0.0);
int count_sign_changes(const RelaxationTrace& tr, double t_start, double omega = 0.0);

// least-squares slope of -ln|P| over [t0, t1]
double fit_decay_rate(const RelaxationTrace& tr, double t0, double t1);

struct TraceClassifyOptions {
    double t_start = 0.01;
    std::optional<double> gamma_min; // smallest decay rate, for the length check
};

struct TraceClassification {
    std::optional<Regime> regime; // empty: inconclusive
    int zeros = 0;
    double half_period = 0.0;
    double t_end = 0.0; // last sample above the noise floor
    std::string reason;
};

TraceClassification classify_from_trace(const RelaxationTrace& tr, const TraceClassifyOptions& opt = {});

} // namespace rtrg
