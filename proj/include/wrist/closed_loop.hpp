#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wrist/mpc.hpp"
#include "wrist/pid.hpp"
#include "wrist/reference.hpp"

namespace wrist {

/// One control-tick record: reference, true plant pose, and actuator channels.
struct TrajectorySample {
    double t = 0.0;
    WristPose ref;
    WristPose actual;
    std::array<double, 3> lengths_m{0.15, 0.15, 0.15};
    std::array<double, 3> temperatures_C{25.0, 25.0, 25.0};
    std::array<double, 3> powers_W{0.0, 0.0, 0.0};
};

struct LoopConfig {
    double control_rate_hz = 10.0;
    double plant_dt = 1e-3;
    double duration = 60.0;
    double pose_noise_std_rad = 0.0;
    std::uint64_t seed = 0;
    double rate_filter_hz = 1.0;  // measured-rate differentiation filter
    WristState x0;
};

using ControllerConfig = std::variant<MpcConfig, PidGains>;

/**
 * Fixed-rate control loop over the RK4 plant: measure pose (optional Gaussian
 * noise), estimate rates by filtered differencing, propagate the thermal
 * observer, run the controller, hold the power over the tick.
 */
std::vector<TrajectorySample> closed_loop_run(const ControllerConfig& controller,
                                              const TrajectoryParams& trajectory,
                                              const LoopConfig& loop,
                                              const PlantParams& plant);

}  // namespace wrist
