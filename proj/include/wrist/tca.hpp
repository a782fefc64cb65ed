#pragma once

#include "wrist/errors.hpp"

namespace wrist {

/**
 * Constants of a single twisted-and-coiled actuator.
 *
 * The actuator is a spring-damper in series with a thermal force term:
 *   F = k (L - L0) + b dL/dt + c (T - T_amb)
 * and its temperature follows a first-order heat balance:
 *   C_th dT/dt = P - lambda (T - T_amb)
 *
 * All values SI: N/m, N*s/m, N/degC, Ohm, W*s/degC, W/degC, degC, m.
 */
struct TcaParams {
    double spring_k = 238.0;
    double damping_b = 0.61;
    double thermal_c = 0.02309;
    double resistance_R = 20.0;
    double thermal_mass_Cth = 0.8236;
    double conductivity_lambda = 0.0235;
    double ambient_Tamb = 25.0;
    double rest_length_L0 = 0.100;

    void validate() const;  // throws DomainError / InvalidInputError
};

/// Temperature of one actuator, degC.
struct TcaThermalState {
    double temperature = 25.0;
};

/// Largest RK4 step used internally; longer steps are subdivided.
inline constexpr double kThermalMaxStep = 1e-3;

/// Advance the heat-balance ODE by dt seconds under constant power (RK4).
TcaThermalState thermal_step(TcaThermalState state, double power_W, double dt_s,
                             const TcaParams& params);

/// Equilibrium temperature under constant power: T_amb + P / lambda.
double steady_state_temp(double power_W, const TcaParams& params);

/// Tensile force of the actuator; positive pulls the attachment points together.
double tca_force(double length_m, double length_rate_m_s, double temperature_C,
                 const TcaParams& params);

}  // namespace wrist
