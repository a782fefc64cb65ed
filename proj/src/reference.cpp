#include "wrist/reference.hpp"

#include <cmath>

namespace wrist {

namespace {

WristPose disk_to_pose(double x, double y) {
    const double theta = std::hypot(x, y);
    if (theta < 1e-12) return WristPose{0.0, 0.0};
    return WristPose::normalized(theta, std::atan2(y, x));
}

/// Position along a closed polyline at arclength fraction s in [0, 1).
WristPose polyline_pose(const std::vector<Eigen::Vector2d>& verts, double s) {
    const size_t n = verts.size();
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += (verts[(i + 1) % n] - verts[i]).norm();
    double target = s * total;
    for (size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d a = verts[i];
        const Eigen::Vector2d b = verts[(i + 1) % n];
        const double len = (b - a).norm();
        if (target <= len || i == n - 1) {
            const double f = len > 0 ? target / len : 0.0;
            const Eigen::Vector2d p = a + f * (b - a);
            return disk_to_pose(p.x(), p.y());
        }
        target -= len;
    }
    return disk_to_pose(verts[0].x(), verts[0].y());
}

}  // namespace

TrajectoryKind trajectory_kind_from_string(const std::string& name) {
    if (name == "circle") return TrajectoryKind::Circle;
    if (name == "square") return TrajectoryKind::Square;
    if (name == "star") return TrajectoryKind::Star;
    if (name == "hold") return TrajectoryKind::Hold;
    if (name == "stepwise") return TrajectoryKind::Stepwise;
    throw ConfigError("unknown trajectory kind '" + name + "'");
}

void TrajectoryParams::validate(double max_bend_rad) const {
    if (!(period > 0) || !(step_interval > 0)) {
        throw ConfigError("trajectory: period and step interval must be > 0");
    }
    if (theta_amp < 0 || hold_theta < 0 || step_size < 0) {
        throw ConfigError("trajectory: angles must be >= 0");
    }
    const double reach = (kind == TrajectoryKind::Square) ? theta_amp * std::sqrt(2.0)
                         : (kind == TrajectoryKind::Hold) ? hold_theta
                                                          : theta_amp;
    if (reach > max_bend_rad + 1e-12) {
        throw ConfigError("trajectory: reference exceeds the configured bend limit");
    }
}

WristPose reference_trajectory(const TrajectoryParams& params, double t) {
    if (!(t >= 0) || !std::isfinite(t)) {
        throw InvalidInputError("reference_trajectory: t must be finite and >= 0");
    }
    const double a = params.theta_amp;
    switch (params.kind) {
        case TrajectoryKind::Circle: {
            const double s = t - params.period * std::floor(t / params.period);
            return WristPose::normalized(a, 2.0 * M_PI * s / params.period);
        }
        case TrajectoryKind::Square: {
            const std::vector<Eigen::Vector2d> verts = {
                {a, 0.0}, {a, a}, {-a, a}, {-a, -a}, {a, -a}};
            const double s = (t - params.period * std::floor(t / params.period)) / params.period;
            return polyline_pose(verts, s);
        }
        case TrajectoryKind::Star: {
            std::vector<Eigen::Vector2d> verts;
            verts.reserve(10);
            for (int k = 0; k < 5; ++k) {
                const double outer = M_PI / 2.0 + k * 2.0 * M_PI / 5.0;
                const double inner = outer + M_PI / 5.0;
                verts.emplace_back(a * std::cos(outer), a * std::sin(outer));
                verts.emplace_back(0.5 * a * std::cos(inner), 0.5 * a * std::sin(inner));
            }
            const double s = (t - params.period * std::floor(t / params.period)) / params.period;
            return polyline_pose(verts, s);
        }
        case TrajectoryKind::Hold:
            return WristPose::normalized(params.hold_theta, params.hold_phi);
        case TrajectoryKind::Stepwise: {
            const double theta =
                std::min(params.theta_amp, params.step_size * std::floor(t / params.step_interval));
            return WristPose::normalized(theta, params.hold_phi);
        }
    }
    throw ConfigError("reference_trajectory: unhandled kind");
}

}  // namespace wrist
