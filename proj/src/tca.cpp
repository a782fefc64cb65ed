#include "wrist/tca.hpp"

#include <cmath>

namespace wrist {

namespace {

bool all_finite(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

void TcaParams::validate() const {
    if (!all_finite({spring_k, damping_b, thermal_c, resistance_R, thermal_mass_Cth,
                     conductivity_lambda, ambient_Tamb, rest_length_L0})) {
        throw InvalidInputError("TcaParams: non-finite value");
    }
    if (spring_k <= 0 || damping_b <= 0 || thermal_c <= 0 || resistance_R <= 0 ||
        thermal_mass_Cth <= 0 || rest_length_L0 <= 0) {
        throw DomainError("TcaParams: all constants must be strictly positive");
    }
    if (conductivity_lambda <= 0) {
        throw DomainError("TcaParams: conductivity must be > 0 (no steady state otherwise)");
    }
}

TcaThermalState thermal_step(TcaThermalState state, double power_W, double dt_s,
                             const TcaParams& params) {
    if (!all_finite({state.temperature, power_W, dt_s})) {
        throw InvalidInputError("thermal_step: non-finite input");
    }
    if (power_W < 0) {
        throw DomainError("thermal_step: power is I^2 R, cannot be negative");
    }
    if (dt_s <= 0) {
        throw InvalidInputError("thermal_step: dt must be > 0");
    }

    const double a = params.conductivity_lambda / params.thermal_mass_Cth;
    const double src = power_W / params.thermal_mass_Cth + a * params.ambient_Tamb;
    auto deriv = [&](double T) { return src - a * T; };

    const int n = static_cast<int>(std::ceil(dt_s / kThermalMaxStep));
    const double h = dt_s / n;
    double T = state.temperature;
    for (int i = 0; i < n; ++i) {
        const double k1 = deriv(T);
        const double k2 = deriv(T + 0.5 * h * k1);
        const double k3 = deriv(T + 0.5 * h * k2);
        const double k4 = deriv(T + h * k3);
        T += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return TcaThermalState{T};
}

double steady_state_temp(double power_W, const TcaParams& params) {
    if (!std::isfinite(power_W)) throw InvalidInputError("steady_state_temp: non-finite power");
    if (power_W < 0) throw DomainError("steady_state_temp: power cannot be negative");
    return params.ambient_Tamb + power_W / params.conductivity_lambda;
}

double tca_force(double length_m, double length_rate_m_s, double temperature_C,
                 const TcaParams& params) {
    if (!all_finite({length_m, length_rate_m_s, temperature_C})) {
        throw InvalidInputError("tca_force: non-finite input");
    }
    if (length_m <= 0) {
        throw InvalidInputError("tca_force: length must be > 0");
    }
    return params.spring_k * (length_m - params.rest_length_L0) +
           params.damping_b * length_rate_m_s +
           params.thermal_c * (temperature_C - params.ambient_Tamb);
}

}  // namespace wrist
