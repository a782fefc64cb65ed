#pragma once

#include <array>

#include <Eigen/Dense>

#include "wrist/tca.hpp"

namespace wrist {

/// Model-based estimate of the unmeasured coil temperatures.
struct ObserverState {
    Eigen::Vector3d estimated_temperatures{25.0, 25.0, 25.0};
};

/// Open-loop propagation of the heat-balance model, one call per actuator.
inline ObserverState observer_step(const ObserverState& obs, const Eigen::Vector3d& applied_power,
                                   double dt, const std::array<TcaParams, 3>& params) {
    ObserverState next;
    for (int i = 0; i < 3; ++i) {
        next.estimated_temperatures(i) =
            thermal_step(TcaThermalState{obs.estimated_temperatures(i)}, applied_power(i), dt,
                         params[static_cast<size_t>(i)])
                .temperature;
    }
    return next;
}

}  // namespace wrist
