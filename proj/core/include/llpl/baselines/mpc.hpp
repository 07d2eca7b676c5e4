#pragma once

#include <array>

#include <Eigen/Dense>

#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::baselines {

struct MpcConfig {
  int horizon_steps = 50;
  double period = 0.1;  // s
  std::array<double, 4> weight_state{10.0, 1.0, 10.0, 1.0};
  double weight_control = 50.0;
  double steer_min = -0.5;  // rad
  double steer_max = 0.5;   // rad
  bool curvature_feedforward = true;

  /// Throws Error(kConfig).
  void validate() const;
};

/// Lateral error state about the reference: offset, offset rate, heading
/// error and heading error rate.
struct ErrorState {
  double e_y = 0.0;
  double e_y_dot = 0.0;
  double e_psi = 0.0;
  double e_psi_dot = 0.0;

  Eigen::Vector4d vector() const { return {e_y, e_y_dot, e_psi, e_psi_dot}; }
};

struct LinearModel {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
};

/// Continuous-time lateral error dynamics of the bicycle model at forward
/// speed vx (reference curvature dropped). Throws Error(kSpeedTooLow) for vx <= 0.5.
LinearModel continuous_error_dynamics(const sim::VehicleParams& params, double vx);

/// Zero-order-hold discretization of continuous_error_dynamics via the matrix
/// exponential of the augmented system.
LinearModel linearize_error_dynamics(const sim::VehicleParams& params, double vx, double period);

/// First control of the finite-horizon problem
///   min sum_{i=1..N} xi_i' Q xi_i + sum_{i=0..N-1} R u_i^2,
/// solved as one condensed least-squares system and clipped to the steer
/// bounds. Falls back to a 1e-9 ridge (logged) when the normal equations are
/// ill-conditioned; throws Error(kNumericalFailure) if that fails too.
double mpc_control(const ErrorState& xi, const MpcConfig& cfg, const Eigen::Matrix4d& A,
                   const Eigen::Vector4d& B);

/// Same, without clipping.
double mpc_control_unclipped(const ErrorState& xi, const MpcConfig& cfg, const Eigen::Matrix4d& A,
                             const Eigen::Vector4d& B);

/// Error state of a vehicle relative to the path at its foot point.
ErrorState error_state(const sim::VehicleState& state, const sim::TrackingError& error,
                       const sim::ReferencePath& path);

/// Closed-loop MPC steering law: MPC on the error state plus curvature
/// feedforward, clipped and rate limited. Linear models are cached per speed.
sim::Controller make_mpc_controller(const MpcConfig& cfg, const sim::VehicleParams& params,
                                    const sim::SimConfig& sim_cfg);

}  // namespace llpl::baselines
