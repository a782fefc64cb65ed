#include "wrist/pid.hpp"

#include <cmath>

namespace wrist {

void PidGains::validate() const {
    if (kp < 0 || ki < 0 || kd < 0 || integral_clamp_W < 0 || baseline_W < 0 ||
        rate_filter_hz <= 0) {
        throw DomainError("PidGains: gains must be >= 0 and filter cutoff > 0");
    }
}

PidController::PidController(PidGains gains, WristGeometry geom, Eigen::Vector3d u_min,
                             Eigen::Vector3d u_max)
    : gains_(gains), geom_(geom), u_min_(std::move(u_min)), u_max_(std::move(u_max)) {
    gains_.validate();
    geom_.validate();
}

void PidController::reset() {
    integral_mm_s_.setZero();
    prev_error_mm_.setZero();
    deriv_filt_.setZero();
    primed_ = false;
    last_error_norm_mm_ = 0.0;
}

Eigen::Vector3d PidController::step(const WristPose& reference, const WristPose& measured,
                                    double dt) {
    if (!(dt > 0)) throw InvalidInputError("PidController::step: dt must be > 0");
    const TcaLengths ref = inverse_kinematics(reference, geom_);
    const TcaLengths meas = inverse_kinematics(measured, geom_);

    Eigen::Vector3d error_mm;
    for (int i = 0; i < 3; ++i) error_mm(i) = (ref[i] - meas[i]) * 1e3;
    last_error_norm_mm_ = error_mm.norm();

    const double alpha = dt / (dt + 1.0 / (2.0 * M_PI * gains_.rate_filter_hz));
    Eigen::Vector3d u;
    for (int i = 0; i < 3; ++i) {
        integral_mm_s_(i) += error_mm(i) * dt;
        if (gains_.ki > 0) {
            // anti-windup: keep the integral contribution inside its clamp
            const double cap = gains_.integral_clamp_W / gains_.ki;
            integral_mm_s_(i) = std::clamp(integral_mm_s_(i), -cap, cap);
        }
        const double raw_rate = primed_ ? (error_mm(i) - prev_error_mm_(i)) / dt : 0.0;
        deriv_filt_(i) += alpha * (raw_rate - deriv_filt_(i));

        const double cmd = gains_.baseline_W + gains_.kp * error_mm(i) +
                           gains_.ki * integral_mm_s_(i) + gains_.kd * deriv_filt_(i);
        u(i) = std::clamp(cmd, u_min_(i), u_max_(i));
    }
    prev_error_mm_ = error_mm;
    primed_ = true;
    return u;
}

}  // namespace wrist
