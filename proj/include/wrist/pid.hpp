#pragma once

#include <Eigen/Dense>

#include "wrist/kinematics.hpp"

namespace wrist {

/**
 * Gains of the per-actuator length-error PID baseline. Errors are taken in
 * millimeters of actuator length, outputs in watts, so kp has units W/mm.
 */
struct PidGains {
    double kp = 48.0;
    double ki = 0.05;
    double kd = 7.2;
    double integral_clamp_W = 5.0;  // bound on the integral contribution
    double baseline_W = 0.0;
    double rate_filter_hz = 1.0;  // first-order filter on the error derivative

    void validate() const;
};

/**
 * Three independent PID loops on actuator length errors. Reference and
 * measured lengths both come from the pose -> length map, mirroring a
 * controller that only sees plate orientation.
 */
class PidController {
public:
    PidController(PidGains gains, WristGeometry geom, Eigen::Vector3d u_min,
                  Eigen::Vector3d u_max);

    Eigen::Vector3d step(const WristPose& reference, const WristPose& measured, double dt);

    /// Euclidean norm of the last length-error vector, millimeters.
    double last_error_norm_mm() const { return last_error_norm_mm_; }

    void reset();

private:
    PidGains gains_;
    WristGeometry geom_;
    Eigen::Vector3d u_min_, u_max_;
    Eigen::Vector3d integral_mm_s_{0.0, 0.0, 0.0};
    Eigen::Vector3d prev_error_mm_{0.0, 0.0, 0.0};
    Eigen::Vector3d deriv_filt_{0.0, 0.0, 0.0};
    bool primed_ = false;
    double last_error_norm_mm_ = 0.0;
};

}  // namespace wrist
