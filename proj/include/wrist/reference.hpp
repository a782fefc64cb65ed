#pragma once

#include <string>

#include "wrist/kinematics.hpp"

namespace wrist {

enum class TrajectoryKind { Circle, Square, Star, Hold, Stepwise };

TrajectoryKind trajectory_kind_from_string(const std::string& name);  // throws ConfigError

/**
 * Reference generators in the bend-plane disk (x, y) = theta (cos phi, sin phi).
 *
 * circle:   constant theta_amp, phi = 2 pi t / period
 * square:   side 2 theta_amp centered at the origin, counterclockwise,
 *           constant speed, starting at (theta_amp, 0)
 * star:     5-pointed, outer radius theta_amp, inner radius 0.5 theta_amp,
 *           constant speed, first outer vertex at azimuth 90 deg
 * hold:     constant (hold_theta, hold_phi)
 * stepwise: theta raised by step_size every step_interval up to theta_amp,
 *           phi fixed at hold_phi
 */
struct TrajectoryParams {
    TrajectoryKind kind = TrajectoryKind::Circle;
    double theta_amp = 15.0 * M_PI / 180.0;
    double period = 60.0;
    double hold_theta = 15.0 * M_PI / 180.0;
    double hold_phi = 0.0;
    double step_size = 10.0 * M_PI / 180.0;
    double step_interval = 15.0;

    void validate(double max_bend_rad) const;
};

WristPose reference_trajectory(const TrajectoryParams& params, double t);

}  // namespace wrist
