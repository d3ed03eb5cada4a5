#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rtrg/flow.hpp"
#include "rtrg/kernels.hpp"
#include "rtrg/model.hpp"

namespace rtrg {

using cplx = std::complex<double>;

struct Rectangle {
    double x0 = -1.5, x1 = 1.5; // Re E
    double y0 = -1.5, y1 = 0.0; // Im E
};

struct MapOptions {
    double fd_step = 0.0; // 0: grid spacing in each direction
    int fd_order = 2;     // 2 or 4
    double max_failed_fraction = 0.1;
    AccuracySpec tol;
};

// |d_{Im E} Re Pi_1 + d_{Re E} Im Pi_1| on a grid, row-major in Im E
struct ResidualMap {
    static constexpr double kSentinel = -1.0;

    Rectangle rect;
    std::size_t nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0; // finite-difference steps actually used
    int fd_order = 2;
    std::vector<double> values;

    double x(std::size_t i) const;
    double y(std::size_t j) const;
    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    std::size_t flagged() const;
};

ResidualMap cr_residual_map(const ModelParams& p, const Rectangle& rect, std::size_t nx, std::size_t ny,
                            const MapOptions& opt = {}, Exec exec = Exec::Parallel);

// residual along the vertical line Re E = x between y_top and y_bottom (n points)
struct ProfilePoint {
    double y;
    double residual; // kSentinel where the flow failed
};
std::vector<ProfilePoint> residual_profile(const ModelParams& p, double x, double y_top, double y_bottom,
                                           std::size_t n, double fd_step, int fd_order,
                                           const AccuracySpec& tol = {});

struct Pole {
    cplx z;             // stored with Re z >= 0; the mirror is -conj(z)
    double omega = 0.0; // |Re z|
    double decay = 0.0; // -Im z
    bool finite_frequency = false;
    cplx mirror() const { return -std::conj(z); }
};

struct PoleOptions {
    double f_tol = 1e-10;
    std::size_t max_iter = 100;
    double omega_tol = 1e-3;
    double max_newton_step = 0.2;
    AccuracySpec tol;
};

struct PoleResult {
    std::vector<Pole> poles; // empty: no pole from this seed
    bool converged = false;
    std::size_t iterations = 0;
    cplx raw{};              // converged iterate before mirroring
    std::string note;
};

// Newton/secant on f(z) = i z - Gamma_1(z)
PoleResult find_poles(const ModelParams& p, cplx seed, const PoleOptions& opt = {});

// zero-T prediction Omega - i Gamma_1*
cplx zero_t_pole_seed(double g);

// follow the pole from T ~ 0 up to p.temperature in steps of at most dT
PoleResult track_pole(const ModelParams& p, double dT = 0.05, const PoleOptions& opt = {});
// same, starting from a known pole at temperature T0
PoleResult track_pole_from(const ModelParams& p, double T0, cplx z0, double dT = 0.05,
                           const PoleOptions& opt = {});

// Flow down the imaginary axis: the leading singularity and the zero-frequency
// poles (roots of gamma - Gamma_1(-i gamma)) above it.
struct AxisScan {
    double gamma0 = 0.0;            // infinity when g = 0
    double gamma2_at_z0 = 0.0;
    std::vector<double> axis_poles; // ascending decay rates
    double h_max = 0.0;             // max of gamma - Gamma_1(-i gamma) on (0, gamma0)
};

struct AxisOptions {
    double stop = 1e-6; // stop where (-iE + Gamma_2/2 + pi T) drops below stop * max(2 pi T, 1)
    AccuracySpec tol;
};

AxisScan axis_scan(const ModelParams& p, const AxisOptions& opt = {});

struct SingularityOptions {
    double x_off = 0.0; // offset of the search line; 0 means |g| 2 pi T (>= 1e-4)
    AxisOptions axis;
};

struct SingularityList {
    std::vector<double> rates; // ascending gamma_m
    bool short_list = false;
    double x_off = 0.0;
};

// decay rates -Im E where Re A_0 = -m (m = 0..count-1) along Re E = x_off
std::vector<double> line_crossings(const ModelParams& p, double x_off, std::size_t count,
                                   const AccuracySpec& tol = {});

// gamma_m at the second-order poles of the flow equations, A_0(E) = -m
SingularityList find_imag_axis_singularities(const ModelParams& p, std::size_t count,
                                             const SingularityOptions& opt = {});

enum class Regime { Incoherent, AsymptoticallyCoherent, PartiallyCoherent };
const char* regime_name(Regime r);

struct SpectralFeatures {
    std::vector<Pole> poles;                // finite-frequency pair representatives
    std::vector<double> axis_poles;         // zero-frequency poles
    std::vector<double> imag_singularities; // gamma_m
    double temperature = 0.0;
    std::optional<Regime> regime;
};

struct Classification {
    Regime regime = Regime::Incoherent;
    bool boundary = false;
};

Classification classify_regime(const SpectralFeatures& f, double omega_tol = 1e-3);

struct FeatureOptions {
    std::size_t singularities = 1;
    double track_dT = 0.05;
    PoleOptions pole;
    SingularityOptions sing;
};

// poles by T-continuation, axis scan, singularities, and the regime label
SpectralFeatures spectral_features(const ModelParams& p, const FeatureOptions& opt = {});

// smallest decay rate among the features (the large-t rate)
double leading_rate(const SpectralFeatures& f);

} // namespace rtrg
