#include "llpl/sim/vehicle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::sim {

bool VehicleState::is_finite() const {
  return std::isfinite(pos_x) && std::isfinite(pos_y) && std::isfinite(yaw) &&
         std::isfinite(vx) && std::isfinite(vy) && std::isfinite(yaw_rate);
}

double VehicleParams::understeer_gradient() const {
  const double cf = cornering_stiffness_front;
  const double cr = cornering_stiffness_rear;
  return mass * (dist_rear_axle * cr - dist_front_axle * cf) / (cf * cr * wheelbase());
}

double VehicleParams::steady_state_yaw_rate(double vx, double steer) const {
  return vx * steer / (wheelbase() + understeer_gradient() * vx * vx);
}

double VehicleParams::steady_state_steer(double vx, double curvature) const {
  return wheelbase() * curvature + understeer_gradient() * vx * vx * curvature;
}

void VehicleParams::validate() const {
  const std::array<double, 8> fields{mass, yaw_inertia, dist_front_axle, dist_rear_axle,
                                     cornering_stiffness_front, cornering_stiffness_rear,
                                     steer_limit, steer_rate_limit};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(ErrorKind::kConfig, "vehicle parameters must be positive and finite");
    }
  }
  if (steer_limit >= std::numbers::pi / 2.0) {
    throw Error(ErrorKind::kConfig, "steer_limit must be below pi/2");
  }
}

int SimConfig::window_steps() const {
  return static_cast<int>(std::lround(horizon_window / control_period));
}

int SimConfig::substeps() const {
  return static_cast<int>(std::lround(control_period / integration_substep));
}

void SimConfig::validate() const {
  if (!(control_period > 0.0) || !(integration_substep > 0.0) || !(horizon_window > 0.0)) {
    throw Error(ErrorKind::kConfig, "timing values must be positive");
  }
  if (integration_substep > 0.05) {
    throw Error(ErrorKind::kConfig, "integration_substep must not exceed 0.05 s");
  }
  const int w = window_steps();
  if (w < 1 || std::abs(w * control_period - horizon_window) > 1e-9 * horizon_window) {
    throw Error(ErrorKind::kConfig, "horizon_window must be an integer multiple of control_period");
  }
  const int n = substeps();
  if (n < 1 || std::abs(n * integration_substep - control_period) > 1e-9 * control_period) {
    throw Error(ErrorKind::kConfig, "integration_substep must divide control_period");
  }
}

double wrap_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double clip_steer(double steer, const VehicleParams& params, bool* clipped) {
  const double out = std::clamp(steer, -params.steer_limit, params.steer_limit);
  if (clipped) *clipped = out != steer;
  return out;
}

double rate_limit_steer(double steer, double prev_steer, const VehicleParams& params,
                        double period) {
  const double max_delta = params.steer_rate_limit * period;
  return std::clamp(steer, prev_steer - max_delta, prev_steer + max_delta);
}

namespace {

// d/dt of (pos_x, pos_y, yaw, vy, yaw_rate); vx is held.
struct Derivative {
  double x, y, yaw, vy, r;
};

Derivative derivative(double yaw, double vx, double vy, double r, double steer,
                      const VehicleParams& p) {
  const double cf = p.cornering_stiffness_front;
  const double cr = p.cornering_stiffness_rear;
  const double lf = p.dist_front_axle;
  const double lr = p.dist_rear_axle;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Derivative d;
  d.x = vx * c - vy * s;
  d.y = vx * s + vy * c;
  d.yaw = r;
  d.vy = -(cf + cr) / (p.mass * vx) * vy + ((lr * cr - lf * cf) / (p.mass * vx) - vx) * r +
         cf / p.mass * steer;
  d.r = (lr * cr - lf * cf) / (p.yaw_inertia * vx) * vy -
        (lf * lf * cf + lr * lr * cr) / (p.yaw_inertia * vx) * r + lf * cf / p.yaw_inertia * steer;
  return d;
}

}  // namespace

VehicleState step_dynamics(const VehicleState& state, double steer, const VehicleParams& params,
                           double dt) {
  bool clipped = false;
  const double u = clip_steer(steer, params, &clipped);
  if (clipped) {
    log::debug("step_dynamics: steer clipped to the steering limit");
  }

  const double vx = state.vx;
  const double h = dt;
  // Yaw is integrated unwrapped within the step and wrapped at the end.
  const Derivative k1 = derivative(state.yaw, vx, state.vy, state.yaw_rate, u, params);
  const Derivative k2 = derivative(state.yaw + 0.5 * h * k1.yaw, vx, state.vy + 0.5 * h * k1.vy,
                                   state.yaw_rate + 0.5 * h * k1.r, u, params);
  const Derivative k3 = derivative(state.yaw + 0.5 * h * k2.yaw, vx, state.vy + 0.5 * h * k2.vy,
                                   state.yaw_rate + 0.5 * h * k2.r, u, params);
  const Derivative k4 = derivative(state.yaw + h * k3.yaw, vx, state.vy + h * k3.vy,
                                   state.yaw_rate + h * k3.r, u, params);

  VehicleState next = state;
  next.pos_x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  next.pos_y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  next.yaw = wrap_angle(state.yaw + h / 6.0 * (k1.yaw + 2.0 * k2.yaw + 2.0 * k3.yaw + k4.yaw));
  next.vy += h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
  next.yaw_rate += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);

  if (!next.is_finite()) {
    std::ostringstream os;
    os << "state became non-finite (x=" << next.pos_x << " y=" << next.pos_y
       << " yaw=" << next.yaw << " vy=" << next.vy << " r=" << next.yaw_rate << ")";
    throw Error(ErrorKind::kNonFiniteState, os.str());
  }
  return next;
}

VehicleState advance_control_period(const VehicleState& state, double steer,
                                    const VehicleParams& params, const SimConfig& cfg) {
  VehicleState s = state;
  const int n = cfg.substeps();
  const double h = cfg.control_period / n;
  for (int i = 0; i < n; ++i) {
    s = step_dynamics(s, steer, params, h);
  }
  return s;
}

}  // namespace llpl::sim
