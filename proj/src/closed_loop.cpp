#include "wrist/closed_loop.hpp"

#include <cmath>
#include <random>

#include "wrist/observer.hpp"

namespace wrist {

std::vector<TrajectorySample> closed_loop_run(const ControllerConfig& controller,
                                              const TrajectoryParams& trajectory,
                                              const LoopConfig& loop,
                                              const PlantParams& plant) {
    plant.validate();
    trajectory.validate(plant.geometry.max_bend_rad);
    if (!(loop.control_rate_hz > 0) || !(loop.plant_dt > 0) || loop.plant_dt > 1e-3 + 1e-12) {
        throw ConfigError("closed_loop_run: needs control rate > 0 and plant dt in (0, 1 ms]");
    }
    if (!(loop.duration >= 0)) throw ConfigError("closed_loop_run: negative duration");

    const double dt = 1.0 / loop.control_rate_hz;
    const int plant_substeps = std::max(1, static_cast<int>(std::llround(dt / loop.plant_dt)));
    const double h = dt / plant_substeps;
    const auto n_ticks = static_cast<long>(std::llround(loop.duration * loop.control_rate_hz));

    std::mt19937_64 rng(loop.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    const bool is_mpc = std::holds_alternative<MpcConfig>(controller);
    std::unique_ptr<NmpcController> mpc;
    std::unique_ptr<PidController> pid;
    Eigen::Vector3d u_min = Eigen::Vector3d::Zero(), u_max = Eigen::Vector3d::Constant(5.0);
    if (is_mpc) {
        mpc = std::make_unique<NmpcController>(std::get<MpcConfig>(controller), plant);
        u_min = mpc->config().u_min;
        u_max = mpc->config().u_max;
    } else {
        pid = std::make_unique<PidController>(std::get<PidGains>(controller), plant.geometry,
                                              u_min, u_max);
    }

    WristState x = loop.x0;
    Eigen::Vector3d u_prev = u_min;
    WristPose meas_prev;
    Eigen::Vector2d rate_filt{0.0, 0.0};
    bool primed = false;
    const double alpha = dt / (dt + 1.0 / (2.0 * M_PI * loop.rate_filter_hz));

    std::vector<TrajectorySample> samples;
    samples.reserve(static_cast<size_t>(n_ticks));

    for (long tick = 0; tick < n_ticks; ++tick) {
        const double t = static_cast<double>(tick) * dt;
        const WristPose ref = reference_trajectory(trajectory, t);

        WristPose meas = x.pose;
        if (loop.pose_noise_std_rad > 0) {
            meas.theta = std::max(0.0, meas.theta + loop.pose_noise_std_rad * noise(rng));
            meas.phi = wrap_angle(meas.phi + loop.pose_noise_std_rad * noise(rng));
        }
        if (primed) {
            const Eigen::Vector2d raw{(meas.theta - meas_prev.theta) / dt,
                                      wrap_angle(meas.phi - meas_prev.phi) / dt};
            rate_filt += alpha * (raw - rate_filt);
        }
        meas_prev = meas;
        primed = true;

        Eigen::Vector3d u;
        if (is_mpc) {
            const MpcConfig& cfg = mpc->config();
            std::vector<WristPose> preview(static_cast<size_t>(cfg.prediction_horizon_p));
            for (int k = 0; k < cfg.prediction_horizon_p; ++k) {
                preview[static_cast<size_t>(k)] =
                    reference_trajectory(trajectory, t + (k + 1) * cfg.step_dt);
            }
            WristState x_ctrl;
            x_ctrl.pose = meas;
            x_ctrl.pose_rates = rate_filt;
            x_ctrl.temperatures = x.temperatures;  // thermal observer state, see below
            u = mpc->solve(x_ctrl, preview, u_prev).u_star;
        } else {
            u = pid->step(ref, meas, dt);
        }
        u = u.cwiseMax(u_min).cwiseMin(u_max);

        TrajectorySample s;
        s.t = t;
        s.ref = ref;
        s.actual = WristPose::normalized(x.pose.theta, x.pose.phi);
        const TcaLengths L = inverse_kinematics(x.pose, plant.geometry);
        for (int i = 0; i < 3; ++i) {
            s.lengths_m[static_cast<size_t>(i)] = L[i];
            s.temperatures_C[static_cast<size_t>(i)] = x.temperatures(i);
            s.powers_W[static_cast<size_t>(i)] = u(i);
        }
        samples.push_back(s);

        try {
            for (int sub = 0; sub < plant_substeps; ++sub) x = rk4_step(x, u, h, plant);
        } catch (const InvalidInputError&) {
            throw DivergenceError("closed_loop_run: plant diverged (tick " +
                                      std::to_string(tick) + ")",
                                  t);
        }
        if (!x.finite()) {
            throw DivergenceError("closed_loop_run: plant diverged (tick " +
                                      std::to_string(tick) + ")",
                                  t);
        }
        u_prev = u;
    }
    return samples;
}

}  // namespace wrist
