#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wrist/dynamics.hpp"

namespace wrist {

/**
 * Receding-horizon controller settings. Tracking errors are weighted in
 * degrees (weight_Q), power magnitudes and moves in watts (weight_S, weight_R).
 * Inputs are held constant for prediction steps beyond the control horizon.
 */
struct MpcConfig {
    int control_horizon_N = 5;
    int prediction_horizon_p = 10;
    double step_dt = 0.1;
    Eigen::Matrix2d weight_Q = Eigen::Vector2d(25.0, 25.0).asDiagonal();
    Eigen::Matrix3d weight_R = Eigen::Vector3d(2.0, 2.0, 2.0).asDiagonal();
    Eigen::Matrix3d weight_S = Eigen::Vector3d(0.25, 0.25, 0.25).asDiagonal();
    Eigen::Vector3d u_min{0.0, 0.0, 0.0};
    Eigen::Vector3d u_max{5.0, 5.0, 5.0};
    int max_sqp_iters = 30;
    double kkt_tolerance = 1e-6;
    /// Internal Euler substep for the prediction rollout; a whole control
    /// interval in one explicit step is unstable against the ~6 Hz plate mode.
    double prediction_substep = 5e-3;
    /// Direction error is ignored below this bending angle (direction undefined).
    double phi_deadband_rad = 2.0 * M_PI / 180.0;

    void validate() const;
};

/// One forward-Euler step of the plant ODE (the prediction model).
WristState discretize(const WristState& state, const Eigen::Vector3d& power_W, double dt,
                      const PlantParams& plant);

/// Forward-Euler integration over one control interval with substeps.
WristState discretize_interval(const WristState& state, const Eigen::Vector3d& power_W,
                               double dt, double substep_max, const PlantParams& plant);

struct NmpcResult {
    Eigen::Vector3d u_star{0.0, 0.0, 0.0};
    double predicted_cost = 0.0;
    int sqp_iterations = 0;
    bool converged = false;
    std::vector<double> cost_trace;  // accepted-iterate costs, non-increasing
};

/// Minimize 0.5 z'Hz + g'z subject to lb <= z <= ub (H positive definite).
Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lb, const Eigen::VectorXd& ub);

/**
 * Gauss-Newton SQP tracker over the thermally driven wrist model. Multiple-
 * shooting linearization is condensed into one dense box-constrained QP per
 * iteration; a backtracking line search keeps the true cost monotone; warm
 * starts shift the previous solution by one interval.
 */
class NmpcController {
public:
    NmpcController(MpcConfig cfg, PlantParams model);

    /// reference holds the desired poses at t + dt, ..., t + p dt.
    NmpcResult solve(const WristState& x_init, std::span<const WristPose> reference,
                     const Eigen::Vector3d& prev_u);

    /// True horizon cost of an input sequence (free moves, held past N).
    double horizon_cost(const WristState& x_init, std::span<const WristPose> reference,
                        const Eigen::Vector3d& prev_u,
                        const std::vector<Eigen::Vector3d>& moves) const;

    const MpcConfig& config() const { return cfg_; }
    void reset_warm_start();

private:
    MpcConfig cfg_;
    PlantParams model_;
    std::vector<Eigen::Vector3d> warm_;
    bool have_warm_ = false;

    struct Rollout {
        std::vector<WristState> states;          // x_1 .. x_p
        Eigen::VectorXd residual_deg;            // 2p, masked and wrapped
        std::vector<bool> phi_masked;            // per stage
        Eigen::MatrixXd sensitivity;             // 2p x 3N, degrees per watt
    };
    Rollout rollout_with_sensitivity(const WristState& x_init,
                                     std::span<const WristPose> reference,
                                     const Eigen::VectorXd& z) const;
};

}  // namespace wrist
