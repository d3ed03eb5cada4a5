#include "rtrg/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rtrg/error.hpp"

namespace rtrg {

double ModelParams::kondo_from_delta() const {
    return delta * std::pow(delta / omega_c, alpha / (1.0 - alpha));
}

ModelParams ModelParams::with_temperature(double T) const {
    if (!(T >= 0.0) || !std::isfinite(T))
        throw DomainError("temperature must be finite and >= 0, got " + std::to_string(T));
    ModelParams p = *this;
    p.temperature = T;
    return p;
}

ModelParams derive_scales(double alpha, double omega_c, double temperature) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    if (!(omega_c >= kScalingFloor) || !std::isfinite(omega_c))
        throw ConfigError("omega_c must be >= 1e3 T_K (scaling limit), got " + std::to_string(omega_c));
    ModelParams p;
    p.alpha = alpha;
    p.g = 1.0 - 2.0 * alpha;
    p.omega_c = omega_c;
    p.kondo_scale = 1.0;
    // T_K = Delta (Delta/omega_c)^{alpha/(1-alpha)} = 1  =>  Delta = omega_c^alpha
    p.delta = std::pow(omega_c, alpha);
    return p.with_temperature(temperature);
}

MatsubaraFrequency matsubara(std::size_t m, double T) {
    return {m, std::numbers::pi * T * (2.0 * static_cast<double>(m) + 1.0)};
}

} // namespace rtrg
