#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wrist/kinematics.hpp"
#include "wrist/tca.hpp"

namespace wrist {

/// Rigid-body constants of the moving parts.
struct BodyParams {
    double end_plate_mass_M = 0.070;
    double linkage_mass_m = 0.030;
    Eigen::Vector3d linkage_inertia_Im{82e-6, 0.1e-6, 82e-6};  // kg m^2, diagonal
    double gravity_g = 9.8;
    Eigen::Vector2d structural_damping_D{0.0, 0.0};  // N m s/rad, diagonal

    void validate() const;
};

/// Full plant state x = [q, q_dot, T] in R^7.
struct WristState {
    WristPose pose;
    Eigen::Vector2d pose_rates{0.0, 0.0};
    Eigen::Vector3d temperatures{25.0, 25.0, 25.0};

    Eigen::Matrix<double, 7, 1> as_vector() const;
    static WristState from_vector(const Eigen::Matrix<double, 7, 1>& x);
    bool finite() const;
};

/// Pieces of M(q) qdd + V(q,qd) + D qd + G(q) = Q(q,qd,T).
struct EomTerms {
    Eigen::Matrix2d mass_matrix;
    Eigen::Vector2d coriolis;
    Eigen::Vector2d gravity;
    Eigen::Vector2d gen_force;
};

/// Everything needed to evaluate the plant dynamics.
struct PlantParams {
    WristGeometry geometry;
    BodyParams body;
    std::array<TcaParams, 3> tca{};
    /// Rigid connection length between plate anchors and the coil of actuator i;
    /// muscle length = L_i - attachment_offset[i]. Chosen so the rest pose has a
    /// configurable pretension elongation.
    std::array<double, 3> attachment_offset{0.05, 0.05, 0.05};

    /// Offsets such that at the rest pose each coil is stretched by pretension[i].
    void set_pretension(const std::array<double, 3>& pretension_m);
    void validate() const;
};

double kinetic_energy(const WristPose& pose, const Eigen::Vector2d& rates,
                      const WristGeometry& geom, const BodyParams& body);

double potential_energy(const WristPose& pose, const WristGeometry& geom,
                        const BodyParams& body);

/// Spring energy stored in the three coils at a pose (rates at zero).
double elastic_energy(const WristPose& pose, const PlantParams& plant);

/// Inertia matrix extracted from the kinetic-energy quadratic form.
Eigen::Matrix2d mass_matrix(const WristPose& pose, const WristGeometry& geom,
                            const BodyParams& body);

/// Centrifugal/Coriolis vector via Christoffel symbols (finite differences of M).
Eigen::Vector2d coriolis_vector(const WristPose& pose, const Eigen::Vector2d& rates,
                                const WristGeometry& geom, const BodyParams& body);

/// Analytic gradient of the potential energy.
Eigen::Vector2d gravity_vector(const WristPose& pose, const WristGeometry& geom,
                               const BodyParams& body);

/// Actuator tensions projected onto the generalized coordinates.
Eigen::Vector2d generalized_forces(const WristPose& pose, const Eigen::Vector2d& rates,
                                   const Eigen::Vector3d& temperatures,
                                   const PlantParams& plant);

EomTerms eom_terms(const WristState& state, const PlantParams& plant);

/// Right-hand side of the 7-state plant ODE.
Eigen::Matrix<double, 7, 1> state_derivative(const WristState& state,
                                             const Eigen::Vector3d& power_W,
                                             const PlantParams& plant);

/// One fixed-step RK4 update of the plant.
WristState rk4_step(const WristState& state, const Eigen::Vector3d& power_W, double dt,
                    const PlantParams& plant);

struct SimSample {
    double t = 0.0;
    WristState state;
    Eigen::Vector3d power{0.0, 0.0, 0.0};
};

/// RK4 rollout under a power schedule; samples every sample_dt (>= dt).
std::vector<SimSample> simulate(const WristState& x0,
                                const std::function<Eigen::Vector3d(double)>& power_schedule,
                                double duration, double dt, const PlantParams& plant,
                                double sample_dt);

}  // namespace wrist
