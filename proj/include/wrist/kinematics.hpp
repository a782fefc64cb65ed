#pragma once

#include <array>

#include <Eigen/Dense>

#include "wrist/errors.hpp"

namespace wrist {

/**
 * Geometry of the 3RRRR parallel wrist: two plates of radius r separated by h
 * at rest, connected by three linkages (short link l1, long link l2) spaced
 * 120 degrees apart, plus three actuators on the plate perimeters.
 */
struct WristGeometry {
    double plate_radius_r = 0.050;
    double plate_separation_h = 0.150;
    double short_link_l1 = 0.030;
    double long_link_l2 = 0.180;
    double max_bend_rad = 50.0 * M_PI / 180.0;

    void validate() const;  // throws GeometryError / InvalidInputError
};

/**
 * Pose of the end plate: bending angle theta (between plate normals) and
 * bending direction phi (azimuth of the bending plane). phi lives in
 * (-pi, pi]; at theta = 0 the direction is undefined and stored as 0.
 */
struct WristPose {
    double theta = 0.0;
    double phi = 0.0;

    /// Wrap phi into (-pi, pi] and zero it at the straight pose.
    static WristPose normalized(double theta, double phi);
};

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

/// Actuator lengths, meters. Closure: L1 + L2 + L3 = 3h.
struct TcaLengths {
    std::array<double, 3> L{0.15, 0.15, 0.15};
    double operator[](int i) const { return L[static_cast<size_t>(i)]; }
    double sum() const { return L[0] + L[1] + L[2]; }
};

/// Azimuthal phase of actuator i in the length equations L_i = h - 2r sin(phi + off_i) sin(theta/2).
inline constexpr std::array<double, 3> kTcaPhase = {0.0, -2.0 * M_PI / 3.0, 2.0 * M_PI / 3.0};

/// Azimuthal phase of linkage i in the joint-angle equations (i = 0, 1, 2).
inline constexpr std::array<double, 3> kLinkagePhase = {0.0, 2.0 * M_PI / 3.0, 4.0 * M_PI / 3.0};

/// Pose -> actuator lengths.
TcaLengths inverse_kinematics(const WristPose& pose, const WristGeometry& geom);

/// Actuator lengths -> pose. Inverse of inverse_kinematics on the workspace.
WristPose forward_kinematics(const TcaLengths& lengths, const WristGeometry& geom);

/// Base-to-end-plate homogeneous transform of the rolling-hemisphere model:
/// Rz(phi) Ry(theta/2) Tz(h) Ry(theta/2) Rz(-phi).
Eigen::Matrix4d end_plate_transform(const WristPose& pose, const WristGeometry& geom);

/// Rest fold angle between long and short links: asin(2r / l2).
double default_fold_angle(const WristGeometry& geom);

/// Joint angles of one linkage: odd = short-link pivot, even = fold deviation.
struct JointAngles {
    double odd = 0.0;
    double even = 0.0;
};

JointAngles joint_angles(const WristPose& pose, int linkage_index);

/// Partial derivatives d(odd)/dq, d(even)/dq with q = [theta, phi]; 2x2.
Eigen::Matrix2d joint_angle_partials(const WristPose& pose, int linkage_index);

/// Time derivatives of joint_angles along (theta_dot, phi_dot).
JointAngles joint_rates(const WristPose& pose, double theta_dot, double phi_dot,
                        int linkage_index);

/// Four-factor joint-chain transform of one linkage at joint angles (d1, d2).
Eigen::Matrix4d linkage_transform(double delta1, double delta2, const WristGeometry& geom);

/// d L_i / d q_j with q = [theta, phi]; rows are actuators. Rows sum to zero.
Eigen::Matrix<double, 3, 2> length_jacobian(const WristPose& pose, const WristGeometry& geom);

}  // namespace wrist
