#include "wrist/dynamics.hpp"

#include <cmath>

namespace wrist {

namespace {

constexpr double kFdStep = 1e-6;  // rad, central differences of M(q)

Eigen::Vector3d linkage_omega(const JointAngles& angles, const JointAngles& rates,
                              double fold_rest) {
    const double a = fold_rest - angles.even;
    return {rates.odd * std::sin(a), -rates.odd * std::cos(a), rates.even};
}

}  // namespace

void BodyParams::validate() const {
    if (!(std::isfinite(end_plate_mass_M) && std::isfinite(linkage_mass_m) &&
          linkage_inertia_Im.allFinite() && std::isfinite(gravity_g) &&
          structural_damping_D.allFinite())) {
        throw InvalidInputError("BodyParams: non-finite value");
    }
    if (end_plate_mass_M <= 0 || linkage_mass_m <= 0) {
        throw DomainError("BodyParams: masses must be > 0");
    }
    if (linkage_inertia_Im.minCoeff() < 0 || structural_damping_D.minCoeff() < 0) {
        throw DomainError("BodyParams: inertia and damping entries must be >= 0");
    }
}

Eigen::Matrix<double, 7, 1> WristState::as_vector() const {
    Eigen::Matrix<double, 7, 1> x;
    x << pose.theta, pose.phi, pose_rates(0), pose_rates(1), temperatures(0), temperatures(1),
        temperatures(2);
    return x;
}

WristState WristState::from_vector(const Eigen::Matrix<double, 7, 1>& x) {
    WristState s;
    s.pose = WristPose{x(0), x(1)};
    s.pose_rates = {x(2), x(3)};
    s.temperatures = {x(4), x(5), x(6)};
    return s;
}

bool WristState::finite() const { return as_vector().allFinite(); }

void PlantParams::set_pretension(const std::array<double, 3>& pretension_m) {
    for (int i = 0; i < 3; ++i) {
        attachment_offset[static_cast<size_t>(i)] =
            geometry.plate_separation_h - tca[static_cast<size_t>(i)].rest_length_L0 -
            pretension_m[static_cast<size_t>(i)];
    }
}

void PlantParams::validate() const {
    geometry.validate();
    body.validate();
    for (const auto& p : tca) p.validate();
    for (int i = 0; i < 3; ++i) {
        const auto idx = static_cast<size_t>(i);
        if (!std::isfinite(attachment_offset[idx])) {
            throw InvalidInputError("PlantParams: non-finite attachment offset");
        }
        if (attachment_offset[idx] >= geometry.plate_separation_h) {
            throw DomainError("PlantParams: attachment offset leaves no muscle length");
        }
    }
}

double kinetic_energy(const WristPose& pose, const Eigen::Vector2d& rates,
                      const WristGeometry& geom, const BodyParams& body) {
    const double h = geom.plate_separation_h, r = geom.plate_radius_r;
    const double th = pose.theta;
    const double td = rates(0), pd = rates(1);

    // End plate: (1/8) M [h^2+r^2, 0; 0, r^2(1+cos^2 th) + 4h^2 sin^2(th/2)]
    const double c = std::cos(th);
    const double sh = std::sin(0.5 * th);
    double T = 0.125 * body.end_plate_mass_M *
               ((h * h + r * r) * td * td +
                (r * r * (1.0 + c * c) + 4.0 * h * h * sh * sh) * pd * pd);

    // Linkages: point-mass term (1/8) m l2^2 w' diag(0,1,1) w plus (1/2) w' Im w.
    const double d0 = default_fold_angle(geom);
    const double ml2 = 0.125 * body.linkage_mass_m * geom.long_link_l2 * geom.long_link_l2;
    for (int i = 0; i < 3; ++i) {
        const JointAngles ang = joint_angles(pose, i);
        const JointAngles rate = joint_rates(pose, td, pd, i);
        const Eigen::Vector3d w = linkage_omega(ang, rate, d0);
        T += ml2 * (w(1) * w(1) + w(2) * w(2));
        T += 0.5 * (body.linkage_inertia_Im(0) * w(0) * w(0) +
                    body.linkage_inertia_Im(1) * w(1) * w(1) +
                    body.linkage_inertia_Im(2) * w(2) * w(2));
    }
    return T;
}

double potential_energy(const WristPose& pose, const WristGeometry& geom,
                        const BodyParams& body) {
    const double d0 = default_fold_angle(geom);
    double V = body.end_plate_mass_M * body.gravity_g * geom.plate_separation_h *
               std::cos(0.5 * pose.theta);
    const double link_w = 0.5 * geom.long_link_l2 * body.linkage_mass_m * body.gravity_g;
    for (int i = 0; i < 3; ++i) {
        V += link_w * std::cos(d0 - joint_angles(pose, i).even);
    }
    return V;
}

double elastic_energy(const WristPose& pose, const PlantParams& plant) {
    const TcaLengths L = inverse_kinematics(pose, plant.geometry);
    double U = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto idx = static_cast<size_t>(i);
        const double stretch =
            L[i] - plant.attachment_offset[idx] - plant.tca[idx].rest_length_L0;
        U += 0.5 * plant.tca[idx].spring_k * stretch * stretch;
    }
    return U;
}

Eigen::Matrix2d mass_matrix(const WristPose& pose, const WristGeometry& geom,
                            const BodyParams& body) {
    const double t1 = kinetic_energy(pose, {1.0, 0.0}, geom, body);
    const double t2 = kinetic_energy(pose, {0.0, 1.0}, geom, body);
    const double t12 = kinetic_energy(pose, {1.0, 1.0}, geom, body);
    Eigen::Matrix2d M;
    M(0, 0) = 2.0 * t1;
    M(1, 1) = 2.0 * t2;
    M(0, 1) = M(1, 0) = t12 - t1 - t2;
    if (!(M(0, 0) > 0.0 && M.determinant() > 0.0)) {
        throw ModelAssemblyError("mass_matrix: lost positive definiteness (check parameters)");
    }
    return M;
}

Eigen::Vector2d coriolis_vector(const WristPose& pose, const Eigen::Vector2d& rates,
                                const WristGeometry& geom, const BodyParams& body) {
    std::array<Eigen::Matrix2d, 2> dM;
    for (int k = 0; k < 2; ++k) {
        WristPose plus = pose, minus = pose;
        (k == 0 ? plus.theta : plus.phi) += kFdStep;
        (k == 0 ? minus.theta : minus.phi) -= kFdStep;
        dM[static_cast<size_t>(k)] =
            (mass_matrix(plus, geom, body) - mass_matrix(minus, geom, body)) / (2.0 * kFdStep);
    }
    // c_k = sum_ij 0.5 (dM_kj/dq_i + dM_ki/dq_j - dM_ij/dq_k) qd_i qd_j
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int k = 0; k < 2; ++k) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double gamma = 0.5 * (dM[static_cast<size_t>(i)](k, j) +
                                            dM[static_cast<size_t>(j)](k, i) -
                                            dM[static_cast<size_t>(k)](i, j));
                acc += gamma * rates(i) * rates(j);
            }
        }
        c(k) = acc;
    }
    return c;
}

Eigen::Vector2d gravity_vector(const WristPose& pose, const WristGeometry& geom,
                               const BodyParams& body) {
    const double d0 = default_fold_angle(geom);
    Eigen::Vector2d g;
    g(0) = -0.5 * body.end_plate_mass_M * body.gravity_g * geom.plate_separation_h *
           std::sin(0.5 * pose.theta);
    g(1) = 0.0;
    const double link_w = 0.5 * geom.long_link_l2 * body.linkage_mass_m * body.gravity_g;
    for (int i = 0; i < 3; ++i) {
        const JointAngles ang = joint_angles(pose, i);
        const Eigen::Matrix2d d = joint_angle_partials(pose, i);
        const double s = link_w * std::sin(d0 - ang.even);
        g(0) += s * d(1, 0);
        g(1) += s * d(1, 1);
    }
    return g;
}

Eigen::Vector2d generalized_forces(const WristPose& pose, const Eigen::Vector2d& rates,
                                   const Eigen::Vector3d& temperatures,
                                   const PlantParams& plant) {
    const TcaLengths L = inverse_kinematics(pose, plant.geometry);
    const Eigen::Matrix<double, 3, 2> jac = length_jacobian(pose, plant.geometry);
    const Eigen::Vector3d length_rates = jac * rates;

    Eigen::Vector3d force;
    for (int i = 0; i < 3; ++i) {
        const auto idx = static_cast<size_t>(i);
        const double muscle_len = L[i] - plant.attachment_offset[idx];
        force(i) = tca_force(muscle_len, length_rates(i), temperatures(i), plant.tca[idx]);
    }
    // Tension does negative work along a lengthening actuator: Q = -J^T F.
    return -jac.transpose() * force;
}

EomTerms eom_terms(const WristState& state, const PlantParams& plant) {
    EomTerms terms;
    terms.mass_matrix = mass_matrix(state.pose, plant.geometry, plant.body);
    terms.coriolis = coriolis_vector(state.pose, state.pose_rates, plant.geometry, plant.body);
    terms.gravity = gravity_vector(state.pose, plant.geometry, plant.body);
    terms.gen_force =
        generalized_forces(state.pose, state.pose_rates, state.temperatures, plant);
    return terms;
}

Eigen::Matrix<double, 7, 1> state_derivative(const WristState& state,
                                             const Eigen::Vector3d& power_W,
                                             const PlantParams& plant) {
    if (!state.finite() || !power_W.allFinite()) {
        throw InvalidInputError("state_derivative: non-finite input");
    }
    if (power_W.minCoeff() < 0) {
        throw DomainError("state_derivative: power must be >= 0 componentwise");
    }

    const EomTerms terms = eom_terms(state, plant);
    const Eigen::Vector2d rhs =
        terms.gen_force - terms.coriolis -
        plant.body.structural_damping_D.cwiseProduct(state.pose_rates) - terms.gravity;
    const Eigen::Matrix2d& M = terms.mass_matrix;
    const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    if (std::abs(det) < 1e-18) {
        throw SingularDynamicsError("state_derivative: singular mass matrix");
    }
    Eigen::Vector2d qdd;
    qdd(0) = (M(1, 1) * rhs(0) - M(0, 1) * rhs(1)) / det;
    qdd(1) = (M(0, 0) * rhs(1) - M(1, 0) * rhs(0)) / det;

    Eigen::Matrix<double, 7, 1> dx;
    dx(0) = state.pose_rates(0);
    dx(1) = state.pose_rates(1);
    dx(2) = qdd(0);
    dx(3) = qdd(1);
    for (int i = 0; i < 3; ++i) {
        const auto& p = plant.tca[static_cast<size_t>(i)];
        dx(4 + i) = (power_W(i) - p.conductivity_lambda * (state.temperatures(i) - p.ambient_Tamb)) /
                    p.thermal_mass_Cth;
    }
    return dx;
}

WristState rk4_step(const WristState& state, const Eigen::Vector3d& power_W, double dt,
                    const PlantParams& plant) {
    using Vec7 = Eigen::Matrix<double, 7, 1>;
    const Vec7 x = state.as_vector();
    const Vec7 k1 = state_derivative(state, power_W, plant);
    const Vec7 k2 = state_derivative(WristState::from_vector(x + 0.5 * dt * k1), power_W, plant);
    const Vec7 k3 = state_derivative(WristState::from_vector(x + 0.5 * dt * k2), power_W, plant);
    const Vec7 k4 = state_derivative(WristState::from_vector(x + dt * k3), power_W, plant);
    return WristState::from_vector(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

std::vector<SimSample> simulate(const WristState& x0,
                                const std::function<Eigen::Vector3d(double)>& power_schedule,
                                double duration, double dt, const PlantParams& plant,
                                double sample_dt) {
    if (!(dt > 0) || dt > 1e-3 + 1e-12) {
        throw InvalidInputError("simulate: requires 0 < dt <= 1 ms");
    }
    if (!(duration > 0)) {
        throw InvalidInputError("simulate: duration must be > 0");
    }
    const auto n_steps = static_cast<long>(std::llround(duration / dt));
    const long stride = std::max(1L, static_cast<long>(std::llround(sample_dt / dt)));

    std::vector<SimSample> out;
    out.reserve(static_cast<size_t>(n_steps / stride) + 2);
    WristState x = x0;
    for (long step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const Eigen::Vector3d u = power_schedule(t);
        if (!u.allFinite() || u.minCoeff() < 0) {
            throw DivergenceError("simulate: invalid power from schedule", t);
        }
        if (step % stride == 0) out.push_back({t, x, u});
        if (step == n_steps) break;
        x = rk4_step(x, u, dt, plant);
        if (!x.finite()) {
            throw DivergenceError("simulate: state diverged", t + dt);
        }
    }
    return out;
}

}  // namespace wrist
