#pragma once

#include <cstdint>

namespace llpl::sim {

/// Planar vehicle state. Pose is in the world frame, velocities in the body
/// frame. vx is an exogenous cruise setpoint and is never integrated.
struct VehicleState {
  double pos_x = 0.0;     // m
  double pos_y = 0.0;     // m
  double yaw = 0.0;       // rad, wrapped to (-pi, pi]
  double vx = 0.0;        // m/s
  double vy = 0.0;        // m/s
  double yaw_rate = 0.0;  // rad/s

  bool is_finite() const;
};

/// Single-track model parameters. Cornering stiffnesses are per axle.
struct VehicleParams {
  double mass = 1500.0;                        // kg
  double yaw_inertia = 2500.0;                 // kg m^2
  double dist_front_axle = 1.2;                // m, CoG to front axle
  double dist_rear_axle = 1.6;                 // m, CoG to rear axle
  double cornering_stiffness_front = 80000.0;  // N/rad
  double cornering_stiffness_rear = 80000.0;   // N/rad
  double steer_limit = 0.5;                    // rad
  double steer_rate_limit = 1.0;               // rad/s

  double wheelbase() const { return dist_front_axle + dist_rear_axle; }

  /// K_us = m (l_r C_r - l_f C_f) / (C_f C_r L), rad per (m/s^2).
  double understeer_gradient() const;

  /// Linear-bicycle steady-state yaw rate for constant steer at speed vx.
  double steady_state_yaw_rate(double vx, double steer) const;

  /// Steer needed to hold a path of curvature kappa at speed vx in steady state.
  double steady_state_steer(double vx, double curvature) const;

  /// Throws Error(kConfig) unless every field is positive and steer_limit < pi/2.
  void validate() const;
};

/// Control/integration timing shared by the simulator and the learners.
struct SimConfig {
  double control_period = 0.1;       // s, T
  double integration_substep = 0.01; // s
  double horizon_window = 0.5;       // s, receding-horizon window
  std::uint64_t rng_seed = 1;

  /// Number of control periods in the horizon window (W = window / T).
  int window_steps() const;
  /// Number of RK4 substeps per control period.
  int substeps() const;

  void validate() const;
};

double wrap_angle(double angle);

/// Clamp steer to +-steer_limit. Sets *clipped when the clamp was active.
double clip_steer(double steer, const VehicleParams& params, bool* clipped = nullptr);

/// Limit the change from prev to steer to steer_rate_limit * period.
double rate_limit_steer(double steer, double prev_steer, const VehicleParams& params, double period);

/// Advance the state by dt with one classic RK4 step of the dynamic bicycle
/// model with linear tires. Steer outside the limit is clipped and logged.
/// Throws Error(kNonFiniteState) if the result is not finite.
VehicleState step_dynamics(const VehicleState& state, double steer, const VehicleParams& params,
                           double dt);

/// Hold steer for one control period, integrating with cfg.integration_substep.
VehicleState advance_control_period(const VehicleState& state, double steer,
                                    const VehicleParams& params, const SimConfig& cfg);

}  // namespace llpl::sim
