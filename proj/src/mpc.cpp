#include "wrist/mpc.hpp"

#include <cmath>

namespace wrist {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

bool psd(const Eigen::MatrixXd& W) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    return es.eigenvalues().minCoeff() > -1e-12;
}

}  // namespace

void MpcConfig::validate() const {
    if (control_horizon_N < 1 || control_horizon_N > prediction_horizon_p) {
        throw ConfigError("mpc: requires 1 <= N <= p");
    }
    if (!(step_dt > 0) || !(prediction_substep > 0)) {
        throw ConfigError("mpc: step_dt and prediction_substep must be > 0");
    }
    if (u_min.minCoeff() < 0) throw ConfigError("mpc: u_min must be >= 0");
    if (((u_max - u_min).array() <= 0).any()) throw ConfigError("mpc: needs u_min < u_max");
    if (!psd(weight_Q) || !psd(weight_R) || !psd(weight_S)) {
        throw ConfigError("mpc: weights must be positive semidefinite");
    }
    if (max_sqp_iters < 1) throw ConfigError("mpc: max_sqp_iters must be >= 1");
}

WristState discretize(const WristState& state, const Eigen::Vector3d& power_W, double dt,
                      const PlantParams& plant) {
    if (!(dt > 0)) throw InvalidInputError("discretize: dt must be > 0");
    const Eigen::Matrix<double, 7, 1> dx = state_derivative(state, power_W, plant);
    return WristState::from_vector(state.as_vector() + dt * dx);
}

WristState discretize_interval(const WristState& state, const Eigen::Vector3d& power_W,
                               double dt, double substep_max, const PlantParams& plant) {
    const int n = std::max(1, static_cast<int>(std::ceil(dt / substep_max)));
    const double h = dt / n;
    WristState x = state;
    for (int i = 0; i < n; ++i) x = discretize(x, power_W, h, plant);
    return x;
}

NmpcController::NmpcController(MpcConfig cfg, PlantParams model)
    : cfg_(std::move(cfg)), model_(std::move(model)) {
    cfg_.validate();
    model_.validate();
    warm_.assign(static_cast<size_t>(cfg_.control_horizon_N), Eigen::Vector3d::Zero());
}

void NmpcController::reset_warm_start() {
    have_warm_ = false;
    for (auto& u : warm_) u.setZero();
}

double NmpcController::horizon_cost(const WristState& x_init,
                                    std::span<const WristPose> reference,
                                    const Eigen::Vector3d& prev_u,
                                    const std::vector<Eigen::Vector3d>& moves) const {
    const int N = cfg_.control_horizon_N;
    const int p = cfg_.prediction_horizon_p;
    double cost = 0.0;
    WristState x = x_init;
    for (int k = 0; k < p; ++k) {
        const Eigen::Vector3d& u = moves[static_cast<size_t>(std::min(k, N - 1))];
        x = discretize_interval(x, u, cfg_.step_dt, cfg_.prediction_substep, model_);
        const WristPose& ref = reference[static_cast<size_t>(k)];
        Eigen::Vector2d e;
        e(0) = (x.pose.theta - ref.theta) * kRadToDeg;
        const bool mask = std::min(ref.theta, x.pose.theta) < cfg_.phi_deadband_rad;
        e(1) = mask ? 0.0 : wrap_angle(x.pose.phi - ref.phi) * kRadToDeg;
        cost += e.dot(cfg_.weight_Q * e);
    }
    for (int k = 0; k < N; ++k) {
        const Eigen::Vector3d& u = moves[static_cast<size_t>(k)];
        const Eigen::Vector3d du = u - (k == 0 ? prev_u : moves[static_cast<size_t>(k - 1)]);
        cost += du.dot(cfg_.weight_R * du) + u.dot(cfg_.weight_S * u);
    }
    return cost;
}

NmpcController::Rollout NmpcController::rollout_with_sensitivity(
    const WristState& x_init, std::span<const WristPose> reference,
    const Eigen::VectorXd& z) const {
    const int N = cfg_.control_horizon_N;
    const int p = cfg_.prediction_horizon_p;
    const int nu = 3 * N;
    const int n_sub = std::max(1, static_cast<int>(std::ceil(cfg_.step_dt / cfg_.prediction_substep)));
    const double h = cfg_.step_dt / n_sub;

    Rollout r;
    r.states.reserve(static_cast<size_t>(p));
    r.residual_deg.resize(2 * p);
    r.phi_masked.assign(static_cast<size_t>(p), false);
    r.sensitivity = Eigen::MatrixXd::Zero(2 * p, nu);

    // dx/du enters only through the thermal channels, exactly 1/C_th each.
    Eigen::Matrix<double, 7, 3> B = Eigen::Matrix<double, 7, 3>::Zero();
    for (int i = 0; i < 3; ++i) B(4 + i, i) = 1.0 / model_.tca[static_cast<size_t>(i)].thermal_mass_Cth;

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(7, nu);  // d x_k / d z
    WristState x = x_init;
    for (int k = 0; k < p; ++k) {
        const int move = std::min(k, N - 1);
        const Eigen::Vector3d u = z.segment<3>(3 * move);

        // State Jacobian frozen over the interval (central differences).
        Eigen::Matrix<double, 7, 7> A;
        const Eigen::Matrix<double, 7, 1> xv = x.as_vector();
        for (int j = 0; j < 7; ++j) {
            const double eps = 1e-6 * std::max(1.0, std::abs(xv(j)));
            Eigen::Matrix<double, 7, 1> xp = xv, xm = xv;
            xp(j) += eps;
            xm(j) -= eps;
            A.col(j) = (state_derivative(WristState::from_vector(xp), u, model_) -
                        state_derivative(WristState::from_vector(xm), u, model_)) /
                       (2.0 * eps);
        }

        for (int s = 0; s < n_sub; ++s) {
            S += h * (A * S);
            S.middleCols(3 * move, 3) += h * B;
            x = discretize(x, u, h, model_);
        }

        r.states.push_back(x);
        const WristPose& ref = reference[static_cast<size_t>(k)];
        r.residual_deg(2 * k) = (x.pose.theta - ref.theta) * kRadToDeg;
        const bool mask = std::min(ref.theta, x.pose.theta) < cfg_.phi_deadband_rad;
        r.phi_masked[static_cast<size_t>(k)] = mask;
        r.residual_deg(2 * k + 1) = mask ? 0.0 : wrap_angle(x.pose.phi - ref.phi) * kRadToDeg;

        r.sensitivity.row(2 * k) = S.row(0) * kRadToDeg;
        r.sensitivity.row(2 * k + 1) = mask ? Eigen::RowVectorXd::Zero(nu).eval()
                                            : (S.row(1) * kRadToDeg).eval();
    }
    return r;
}

Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lb, const Eigen::VectorXd& ub) {
    const auto n = H.rows();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n).cwiseMax(lb).cwiseMin(ub);
    // fixed[i]: -1 at lower bound, +1 at upper, 0 free
    Eigen::VectorXi fixed = Eigen::VectorXi::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (z(i) <= lb(i)) fixed(i) = -1;
        if (z(i) >= ub(i)) fixed(i) = 1;
    }

    for (int iter = 0; iter < 40 * static_cast<int>(n); ++iter) {
        std::vector<Eigen::Index> free_idx;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fixed(i) == 0) free_idx.push_back(i);
        }

        Eigen::VectorXd target = z;
        if (!free_idx.empty()) {
            const auto m = static_cast<Eigen::Index>(free_idx.size());
            Eigen::MatrixXd Hff(m, m);
            Eigen::VectorXd rhs(m);
            for (Eigen::Index a = 0; a < m; ++a) {
                rhs(a) = -g(free_idx[static_cast<size_t>(a)]);
                for (Eigen::Index b = 0; b < m; ++b) {
                    Hff(a, b) = H(free_idx[static_cast<size_t>(a)], free_idx[static_cast<size_t>(b)]);
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (fixed(i) != 0) rhs(a) -= H(free_idx[static_cast<size_t>(a)], i) * z(i);
                }
            }
            const Eigen::VectorXd zf = Hff.ldlt().solve(rhs);
            for (Eigen::Index a = 0; a < m; ++a) target(free_idx[static_cast<size_t>(a)]) = zf(a);
        }

        // Step toward the equality-constrained optimum, stopping at the first bound.
        double alpha = 1.0;
        Eigen::Index blocking = -1;
        int blocking_side = 0;
        for (const Eigen::Index i : free_idx) {
            const double d = target(i) - z(i);
            if (d > 0 && z(i) + d > ub(i)) {
                const double a = (ub(i) - z(i)) / d;
                if (a < alpha) { alpha = a; blocking = i; blocking_side = 1; }
            } else if (d < 0 && z(i) + d < lb(i)) {
                const double a = (lb(i) - z(i)) / d;
                if (a < alpha) { alpha = a; blocking = i; blocking_side = -1; }
            }
        }
        for (const Eigen::Index i : free_idx) z(i) += alpha * (target(i) - z(i));
        if (blocking >= 0) {
            z(blocking) = blocking_side > 0 ? ub(blocking) : lb(blocking);
            fixed(blocking) = blocking_side;
            continue;
        }

        // At the free-space optimum; check bound multipliers.
        const Eigen::VectorXd grad = H * z + g;
        Eigen::Index worst = -1;
        double worst_viol = 1e-10;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fixed(i) == -1 && -grad(i) > worst_viol) { worst_viol = -grad(i); worst = i; }
            if (fixed(i) == 1 && grad(i) > worst_viol) { worst_viol = grad(i); worst = i; }
        }
        if (worst < 0) break;
        fixed(worst) = 0;
    }
    return z.cwiseMax(lb).cwiseMin(ub);
}

NmpcResult NmpcController::solve(const WristState& x_init, std::span<const WristPose> reference,
                                 const Eigen::Vector3d& prev_u) {
    const int N = cfg_.control_horizon_N;
    const int p = cfg_.prediction_horizon_p;
    const int nu = 3 * N;
    if (static_cast<int>(reference.size()) != p) {
        throw InvalidInputError("nmpc_solve: reference must hold p poses");
    }
    if (((prev_u - cfg_.u_max).array() > 1e-9).any() ||
        ((cfg_.u_min - prev_u).array() > 1e-9).any()) {
        throw InvalidInputError("nmpc_solve: prev_u outside input bounds");
    }

    Eigen::VectorXd lb(nu), ub(nu);
    for (int k = 0; k < N; ++k) {
        lb.segment<3>(3 * k) = cfg_.u_min;
        ub.segment<3>(3 * k) = cfg_.u_max;
    }

    // Warm start: shift previous solution, repeat the last move.
    Eigen::VectorXd z(nu);
    for (int k = 0; k < N; ++k) {
        const Eigen::Vector3d u0 =
            have_warm_ ? warm_[static_cast<size_t>(std::min(k + 1, N - 1))] : prev_u;
        z.segment<3>(3 * k) = u0.cwiseMax(cfg_.u_min).cwiseMin(cfg_.u_max);
    }

    auto unpack = [&](const Eigen::VectorXd& v) {
        std::vector<Eigen::Vector3d> moves(static_cast<size_t>(N));
        for (int k = 0; k < N; ++k) moves[static_cast<size_t>(k)] = v.segment<3>(3 * k);
        return moves;
    };

    NmpcResult result;
    double cost = horizon_cost(x_init, reference, prev_u, unpack(z));
    result.cost_trace.push_back(cost);

    // Block-diagonal input weights and move-difference coupling, built once.
    Eigen::MatrixXd S_blk = Eigen::MatrixXd::Zero(nu, nu);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nu, nu);  // z -> stacked (u_k - u_{k-1})
    Eigen::VectorXd d0 = Eigen::VectorXd::Zero(nu);     // subtracted previous input
    for (int k = 0; k < N; ++k) {
        S_blk.block<3, 3>(3 * k, 3 * k) = cfg_.weight_S;
        D.block<3, 3>(3 * k, 3 * k) = Eigen::Matrix3d::Identity();
        if (k > 0) D.block<3, 3>(3 * k, 3 * (k - 1)) = -Eigen::Matrix3d::Identity();
    }
    d0.segment<3>(0) = prev_u;
    Eigen::MatrixXd R_blk = Eigen::MatrixXd::Zero(nu, nu);
    for (int k = 0; k < N; ++k) R_blk.block<3, 3>(3 * k, 3 * k) = cfg_.weight_R;

    Eigen::MatrixXd Q_blk = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    for (int k = 0; k < p; ++k) Q_blk.block<2, 2>(2 * k, 2 * k) = cfg_.weight_Q;

    int iter = 0;
    for (; iter < cfg_.max_sqp_iters; ++iter) {
        const Rollout roll = rollout_with_sensitivity(x_init, reference, z);
        const Eigen::MatrixXd& G = roll.sensitivity;

        const Eigen::VectorXd dr = D * z - d0;
        Eigen::VectorXd grad = 2.0 * (G.transpose() * (Q_blk * roll.residual_deg) +
                                      D.transpose() * (R_blk * dr) + S_blk * z);
        Eigen::MatrixXd H = 2.0 * (G.transpose() * Q_blk * G + D.transpose() * R_blk * D + S_blk);
        H.diagonal().array() += 1e-10;

        // Projected-gradient stationarity test.
        double kkt = 0.0;
        for (int i = 0; i < nu; ++i) {
            double gi = grad(i);
            if (z(i) <= lb(i) + 1e-12) gi = std::min(gi, 0.0);
            if (z(i) >= ub(i) - 1e-12) gi = std::max(gi, 0.0);
            kkt = std::max(kkt, std::abs(gi));
        }
        if (kkt <= cfg_.kkt_tolerance * (1.0 + std::abs(cost))) {
            result.converged = true;
            break;
        }

        const Eigen::VectorXd z_qp = solve_box_qp(H, grad - H * z, lb - z, ub - z) + z;
        const Eigen::VectorXd dz = z_qp - z;
        if (dz.lpNorm<Eigen::Infinity>() < 1e-12) {
            result.converged = true;
            break;
        }

        const double directional = grad.dot(dz);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 10; ++ls) {
            const Eigen::VectorXd z_try =
                (z + alpha * dz).cwiseMax(lb).cwiseMin(ub);
            const double c_try = horizon_cost(x_init, reference, prev_u, unpack(z_try));
            if (c_try <= cost + 1e-4 * alpha * std::min(directional, 0.0) && c_try <= cost) {
                z = z_try;
                cost = c_try;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        result.cost_trace.push_back(cost);
        if (!accepted) break;  // stalled; return best iterate with converged=false
    }

    warm_ = unpack(z);
    have_warm_ = true;
    result.sqp_iterations = iter;
    result.u_star = z.segment<3>(0).cwiseMax(cfg_.u_min).cwiseMin(cfg_.u_max);
    result.predicted_cost = cost;
    return result;
}

}  // namespace wrist
