#pragma once

#include <cstddef>

namespace rtrg {

// Energies in units of the Kondo scale, times in units of its inverse.
struct ModelParams {
    double alpha = 0.5;        // ohmic coupling
    double g = 0.0;            // 1 - 2 alpha
    double temperature = 0.0;
    double kondo_scale = 1.0;  // T_K, fixed by convention
    double omega_c = 1e4;      // bandwidth
    double delta = 100.0;      // bare tunnelling

    // Gamma_1 = Gamma_2 = Delta^2/omega_c at E = i omega_c
    double initial_rate() const { return delta * delta / omega_c; }
    // recompute T_K from (delta, omega_c, alpha)
    double kondo_from_delta() const;
    ModelParams with_temperature(double T) const;
};

inline constexpr double kScalingFloor = 1e3;
inline constexpr double kDefaultOmegaC = 1e4;

ModelParams derive_scales(double alpha, double omega_c = kDefaultOmegaC, double temperature = 0.0);

struct MatsubaraFrequency {
    std::size_t index = 0;
    double value = 0.0;
};

MatsubaraFrequency matsubara(std::size_t m, double T);

} // namespace rtrg
