#include "wrist/kinematics.hpp"

#include <cmath>

namespace wrist {

namespace {

constexpr double kStraightTol = 1e-12;  // sin(theta/2) below this counts as straight

bool finite_pose(const WristPose& p) {
    return std::isfinite(p.theta) && std::isfinite(p.phi);
}

Eigen::Matrix4d rot_z(double a) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    const double c = std::cos(a), s = std::sin(a);
    m(0, 0) = c; m(0, 1) = -s;
    m(1, 0) = s; m(1, 1) = c;
    return m;
}

Eigen::Matrix4d rot_y(double a) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    const double c = std::cos(a), s = std::sin(a);
    m(0, 0) = c; m(0, 2) = s;
    m(2, 0) = -s; m(2, 2) = c;
    return m;
}

Eigen::Matrix4d rot_x(double a) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    const double c = std::cos(a), s = std::sin(a);
    m(1, 1) = c; m(1, 2) = -s;
    m(2, 1) = s; m(2, 2) = c;
    return m;
}

Eigen::Matrix4d translate(double x, double y, double z) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m(0, 3) = x; m(1, 3) = y; m(2, 3) = z;
    return m;
}

void check_linkage_index(int i) {
    if (i < 0 || i > 2) throw InvalidInputError("linkage index must be 0, 1 or 2");
}

}  // namespace

void WristGeometry::validate() const {
    if (!(std::isfinite(plate_radius_r) && std::isfinite(plate_separation_h) &&
          std::isfinite(short_link_l1) && std::isfinite(long_link_l2) &&
          std::isfinite(max_bend_rad))) {
        throw InvalidInputError("WristGeometry: non-finite value");
    }
    if (plate_radius_r <= 0 || plate_separation_h <= 0 || short_link_l1 <= 0 ||
        long_link_l2 <= 0) {
        throw GeometryError("WristGeometry: all lengths must be > 0");
    }
    if (2.0 * plate_radius_r > long_link_l2) {
        throw GeometryError("WristGeometry: requires 2r <= l2 for the rest fold angle");
    }
    if (max_bend_rad <= 0 || max_bend_rad >= M_PI) {
        throw GeometryError("WristGeometry: max bend must lie in (0, pi)");
    }
}

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * M_PI);
    if (w <= -M_PI) w += 2.0 * M_PI;
    return w;
}

WristPose WristPose::normalized(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw InvalidInputError("WristPose: non-finite angle");
    }
    if (std::abs(theta) < kStraightTol) return WristPose{0.0, 0.0};
    return WristPose{theta, wrap_angle(phi)};
}

TcaLengths inverse_kinematics(const WristPose& pose, const WristGeometry& geom) {
    if (!finite_pose(pose)) throw InvalidInputError("inverse_kinematics: non-finite pose");
    const double s_half = std::sin(0.5 * pose.theta);
    const double two_r = 2.0 * geom.plate_radius_r;
    TcaLengths out;
    for (int i = 0; i < 3; ++i) {
        out.L[static_cast<size_t>(i)] =
            geom.plate_separation_h - two_r * std::sin(pose.phi + kTcaPhase[static_cast<size_t>(i)]) * s_half;
    }
    return out;
}

WristPose forward_kinematics(const TcaLengths& lengths, const WristGeometry& geom) {
    const double L1 = lengths[0], L2 = lengths[1], L3 = lengths[2];
    if (!(std::isfinite(L1) && std::isfinite(L2) && std::isfinite(L3))) {
        throw InvalidInputError("forward_kinematics: non-finite length");
    }
    if (L1 <= 0 || L2 <= 0 || L3 <= 0) {
        throw InvalidInputError("forward_kinematics: lengths must be > 0");
    }
    const double closure = lengths.sum() - 3.0 * geom.plate_separation_h;
    if (std::abs(closure) > 1e-9) {
        throw InconsistentLengthsError("forward_kinematics: L1+L2+L3 != 3h (off by " +
                                       std::to_string(closure) + " m)");
    }

    // The radicand L1^2+L2^2+L3^2-L1L2-L1L3-L2L3 equals 9 r^2 sin^2(theta/2);
    // the pairwise-difference form below is algebraically identical and avoids
    // cancellation between ~h^2 terms.
    const double d12 = L1 - L2, d13 = L1 - L3, d23 = L2 - L3;
    const double radicand = 0.5 * (d12 * d12 + d13 * d13 + d23 * d23);
    const double s_half = std::sqrt(radicand) / (3.0 * geom.plate_radius_r);
    if (s_half > 1.0 + 1e-12) {
        throw InfeasibleLengthsError("forward_kinematics: lengths outside reachable set");
    }

    if (s_half < kStraightTol) return WristPose{0.0, 0.0};
    const double theta = 2.0 * std::asin(std::min(s_half, 1.0));
    // sin(phi) ~ L2+L3-2L1, cos(phi) ~ sqrt(3) (L2-L3), both scaled by 6 r sin(theta/2)
    const double phi = std::atan2((L2 - L1) + (L3 - L1), std::sqrt(3.0) * d23);
    return WristPose::normalized(theta, phi);
}

Eigen::Matrix4d end_plate_transform(const WristPose& pose, const WristGeometry& geom) {
    if (!finite_pose(pose)) throw InvalidInputError("end_plate_transform: non-finite pose");
    const double half = 0.5 * pose.theta;
    return rot_z(pose.phi) * rot_y(half) * translate(0, 0, geom.plate_separation_h) *
           rot_y(half) * rot_z(-pose.phi);
}

double default_fold_angle(const WristGeometry& geom) {
    const double ratio = 2.0 * geom.plate_radius_r / geom.long_link_l2;
    if (!std::isfinite(ratio)) throw InvalidInputError("default_fold_angle: non-finite ratio");
    if (ratio > 1.0) throw GeometryError("default_fold_angle: 2r > l2 has no solution");
    return std::asin(ratio);
}

JointAngles joint_angles(const WristPose& pose, int linkage_index) {
    check_linkage_index(linkage_index);
    if (!finite_pose(pose)) throw InvalidInputError("joint_angles: non-finite pose");
    const double psi = pose.phi + kLinkagePhase[static_cast<size_t>(linkage_index)];
    const double odd = std::atan(-std::cos(psi) * std::tan(0.5 * pose.theta));
    // Fold deviation from the rest angle. sin(even) = sin(psi) sin(theta/2) is the
    // exact fold of the joint chain Ry(odd) Rx(2 even) Ry(odd) realizing the plate
    // tilt; it stays bounded and continuous over the whole workspace.
    const double even = std::asin(std::sin(psi) * std::sin(0.5 * pose.theta));
    return JointAngles{odd, even};
}

Eigen::Matrix2d joint_angle_partials(const WristPose& pose, int linkage_index) {
    check_linkage_index(linkage_index);
    if (!finite_pose(pose)) throw InvalidInputError("joint_angle_partials: non-finite pose");
    const double psi = pose.phi + kLinkagePhase[static_cast<size_t>(linkage_index)];
    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    const double half = 0.5 * pose.theta;
    const double t = std::tan(half), s = std::sin(half), c = std::cos(half);

    Eigen::Matrix2d d;
    // odd = atan(u), u = -cos(psi) tan(theta/2)
    const double u = -cpsi * t;
    const double den_odd = 1.0 + u * u;
    d(0, 0) = (-cpsi * 0.5 * (1.0 + t * t)) / den_odd;
    d(0, 1) = (spsi * t) / den_odd;
    // even = asin(v), v = sin(psi) sin(theta/2)
    const double v = spsi * s;
    const double den_even = std::sqrt(std::max(1.0 - v * v, 1e-15));
    d(1, 0) = (spsi * 0.5 * c) / den_even;
    d(1, 1) = (cpsi * s) / den_even;
    return d;
}

JointAngles joint_rates(const WristPose& pose, double theta_dot, double phi_dot,
                        int linkage_index) {
    if (!std::isfinite(theta_dot) || !std::isfinite(phi_dot)) {
        throw InvalidInputError("joint_rates: non-finite rates");
    }
    const Eigen::Matrix2d d = joint_angle_partials(pose, linkage_index);
    return JointAngles{d(0, 0) * theta_dot + d(0, 1) * phi_dot,
                       d(1, 0) * theta_dot + d(1, 1) * phi_dot};
}

Eigen::Matrix4d linkage_transform(double delta1, double delta2, const WristGeometry& geom) {
    if (!std::isfinite(delta1) || !std::isfinite(delta2)) {
        throw InvalidInputError("linkage_transform: non-finite angle");
    }
    const double d0 = default_fold_angle(geom);
    const double r = geom.plate_radius_r;
    const double l1 = geom.short_link_l1;
    const double l2 = geom.long_link_l2;
    // Base pivot (y), fold open (x), fold close (x), top pivot (y); each joint
    // frame is offset from its parent before the rotation applies.
    return translate(0, r, 0) * rot_y(delta1) *
           translate(0, 0, l1) * rot_x(delta2 + d0) *
           translate(0, 0, l2) * rot_x(delta2 - d0) *
           translate(0, 2.0 * r, l1) * rot_y(delta1);
}

Eigen::Matrix<double, 3, 2> length_jacobian(const WristPose& pose, const WristGeometry& geom) {
    if (!finite_pose(pose)) throw InvalidInputError("length_jacobian: non-finite pose");
    const double r = geom.plate_radius_r;
    const double c_half = std::cos(0.5 * pose.theta);
    const double s_half = std::sin(0.5 * pose.theta);
    Eigen::Matrix<double, 3, 2> jac;
    for (int i = 0; i < 3; ++i) {
        const double psi = pose.phi + kTcaPhase[static_cast<size_t>(i)];
        jac(i, 0) = -r * std::sin(psi) * c_half;
        jac(i, 1) = -2.0 * r * std::cos(psi) * s_half;
    }
    return jac;
}

}  // namespace wrist
