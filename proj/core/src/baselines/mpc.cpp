#include "llpl/baselines/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::baselines {

void MpcConfig::validate() const {
  if (horizon_steps < 1) throw Error(ErrorKind::kConfig, "mpc horizon_steps must be >= 1");
  if (!(period > 0.0)) throw Error(ErrorKind::kConfig, "mpc period must be positive");
  for (double q : weight_state) {
    if (!(q > 0.0)) throw Error(ErrorKind::kConfig, "mpc state weights must be positive");
  }
  if (!(weight_control > 0.0)) throw Error(ErrorKind::kConfig, "mpc control weight must be positive");
  if (!(steer_min < steer_max)) throw Error(ErrorKind::kConfig, "mpc steer bounds are empty");
}

LinearModel continuous_error_dynamics(const sim::VehicleParams& p, double vx) {
  if (!(vx > 0.5)) {
    throw Error(ErrorKind::kSpeedTooLow, "error dynamics are singular below 0.5 m/s");
  }
  const double cf = p.cornering_stiffness_front;
  const double cr = p.cornering_stiffness_rear;
  const double lf = p.dist_front_axle;
  const double lr = p.dist_rear_axle;
  const double m = p.mass;
  const double iz = p.yaw_inertia;

  LinearModel c;
  c.A.setZero();
  c.A(0, 1) = 1.0;
  c.A(1, 1) = -(cf + cr) / (m * vx);
  c.A(1, 2) = (cf + cr) / m;
  c.A(1, 3) = (lr * cr - lf * cf) / (m * vx);
  c.A(2, 3) = 1.0;
  c.A(3, 1) = (lr * cr - lf * cf) / (iz * vx);
  c.A(3, 2) = (lf * cf - lr * cr) / iz;
  c.A(3, 3) = -(lf * lf * cf + lr * lr * cr) / (iz * vx);
  c.B << 0.0, cf / m, 0.0, lf * cf / iz;
  return c;
}

LinearModel linearize_error_dynamics(const sim::VehicleParams& params, double vx, double period) {
  const LinearModel c = continuous_error_dynamics(params, vx);
  Eigen::Matrix<double, 5, 5> aug = Eigen::Matrix<double, 5, 5>::Zero();
  aug.topLeftCorner<4, 4>() = c.A * period;
  aug.topRightCorner<4, 1>() = c.B * period;
  const Eigen::Matrix<double, 5, 5> e = aug.exp();
  LinearModel d;
  d.A = e.topLeftCorner<4, 4>();
  d.B = e.topRightCorner<4, 1>();
  return d;
}

double mpc_control_unclipped(const ErrorState& xi, const MpcConfig& cfg, const Eigen::Matrix4d& A,
                             const Eigen::Vector4d& B) {
  const int n = cfg.horizon_steps;
  const Eigen::Index rows = 4 * n;

  // Prediction X = Phi xi0 + Gamma U over steps 1..N.
  Eigen::MatrixXd phi(rows, 4);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(rows, n);
  std::vector<Eigen::Vector4d> ab(static_cast<std::size_t>(n));  // A^k B
  Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
  for (int k = 0; k < n; ++k) {
    ab[static_cast<std::size_t>(k)] = power * B;
    power = A * power;
    phi.block<4, 4>(4 * k, 0) = power;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      gamma.block<4, 1>(4 * i, j) = ab[static_cast<std::size_t>(i - j)];
    }
  }

  Eigen::VectorXd qbar(rows);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < 4; ++r) qbar(4 * i + r) = cfg.weight_state[static_cast<std::size_t>(r)];
  }
  const Eigen::MatrixXd qg = qbar.asDiagonal() * gamma;
  Eigen::MatrixXd h = gamma.transpose() * qg;
  h.diagonal().array() += cfg.weight_control;
  const Eigen::VectorXd g = qg.transpose() * (phi * xi.vector());

  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    log::warn("mpc_control: ill-conditioned normal equations, adding a 1e-9 ridge");
    h.diagonal().array() += 1e-9;
    llt.compute(h);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::kNumericalFailure, "mpc normal equations are not positive definite");
    }
  }
  const Eigen::VectorXd u = -llt.solve(g);
  if (!u.allFinite()) throw Error(ErrorKind::kNumericalFailure, "mpc solution is not finite");
  return u(0);
}

double mpc_control(const ErrorState& xi, const MpcConfig& cfg, const Eigen::Matrix4d& A,
                   const Eigen::Vector4d& B) {
  return std::clamp(mpc_control_unclipped(xi, cfg, A, B), cfg.steer_min, cfg.steer_max);
}

ErrorState error_state(const sim::VehicleState& state, const sim::TrackingError& error,
                       const sim::ReferencePath& path) {
  ErrorState xi;
  xi.e_y = error.lateral;
  xi.e_psi = error.heading;
  xi.e_y_dot = state.vy * std::cos(error.heading) + state.vx * std::sin(error.heading);
  xi.e_psi_dot = state.yaw_rate - state.vx * path.curvature(error.station);
  return xi;
}

sim::Controller make_mpc_controller(const MpcConfig& cfg, const sim::VehicleParams& params,
                                    const sim::SimConfig& sim_cfg) {
  cfg.validate();
  auto cache = std::make_shared<std::map<double, LinearModel>>();
  return [cfg, params, sim_cfg, cache](const sim::ControlContext& ctx) {
    const double vx = ctx.state.vx;
    auto it = cache->find(vx);
    if (it == cache->end()) {
      it = cache->emplace(vx, linearize_error_dynamics(params, vx, cfg.period)).first;
    }
    const ErrorState xi = error_state(ctx.state, ctx.error, ctx.path);
    double steer = mpc_control_unclipped(xi, cfg, it->second.A, it->second.B);
    if (cfg.curvature_feedforward) {
      steer += params.steady_state_steer(vx, ctx.path.curvature(ctx.error.station));
    }
    steer = std::clamp(steer, cfg.steer_min, cfg.steer_max);
    steer = sim::clip_steer(steer, params);
    return sim::rate_limit_steer(steer, ctx.prev_steer, params, sim_cfg.control_period);
  };
}

}  // namespace llpl::baselines
