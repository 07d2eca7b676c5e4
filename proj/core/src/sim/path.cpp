#include "llpl/sim/path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "llpl/error.hpp"

namespace llpl::sim {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values.size() != n) {
    throw Error(ErrorKind::kBadWaypoints, "spline needs at least two matching knots/values");
  }
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = knots_[i + 1] - knots_[i];
    if (!(h[i] > 0.0)) {
      throw Error(ErrorKind::kBadWaypoints, "spline knots must be strictly increasing");
    }
  }

  // Natural boundary: second derivative zero at both ends. Thomas algorithm on
  // the tridiagonal system for the interior second-derivative coefficients.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      diag[i] = 2.0 * (h[i] + h[i + 1]);
      upper[i] = h[i + 1];
      rhs[i] = 6.0 * ((values[i + 2] - values[i + 1]) / h[i + 1] - (values[i + 1] - values[i]) / h[i]);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = h[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) {
      m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
    }
  }

  a_.resize(n - 1);
  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a_[i] = values[i];
    b_[i] = (values[i + 1] - values[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
}

std::size_t CubicSpline::interval(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, a_.size() - 1);
}

double CubicSpline::value(double t) const {
  const std::size_t i = interval(t);
  const double dt = t - knots_[i];
  return a_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

double CubicSpline::first_derivative(double t) const {
  const std::size_t i = interval(t);
  const double dt = t - knots_[i];
  return b_[i] + dt * (2.0 * c_[i] + 3.0 * dt * d_[i]);
}

double CubicSpline::second_derivative(double t) const {
  const std::size_t i = interval(t);
  const double dt = t - knots_[i];
  return 2.0 * c_[i] + 6.0 * dt * d_[i];
}

namespace {

constexpr int kSubdivisions = 8;

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

}  // namespace

ReferencePath ReferencePath::from_waypoints(const std::vector<Point2>& waypoints,
                                            std::vector<double> section_boundaries) {
  if (waypoints.size() < 4) {
    throw Error(ErrorKind::kBadWaypoints, "need at least 4 waypoints, got " +
                                              std::to_string(waypoints.size()));
  }
  ReferencePath path;
  path.waypoints_ = waypoints;

  std::vector<double> knots(waypoints.size());
  std::vector<double> xs(waypoints.size()), ys(waypoints.size());
  knots[0] = 0.0;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    xs[i] = waypoints[i].x;
    ys[i] = waypoints[i].y;
    if (i > 0) {
      const double chord = std::hypot(waypoints[i].x - waypoints[i - 1].x,
                                      waypoints[i].y - waypoints[i - 1].y);
      if (!(chord > 1e-9)) {
        std::ostringstream os;
        os << "duplicate waypoint at index " << i;
        throw Error(ErrorKind::kBadWaypoints, os.str());
      }
      knots[i] = knots[i - 1] + chord;
    }
  }
  path.sx_ = CubicSpline(knots, xs);
  path.sy_ = CubicSpline(knots, ys);

  auto speed = [&](double u) {
    return std::hypot(path.sx_.first_derivative(u), path.sy_.first_derivative(u));
  };

  const std::size_t grid = (knots.size() - 1) * kSubdivisions + 1;
  path.params_.reserve(grid);
  path.arclength_.reserve(grid);
  path.params_.push_back(0.0);
  path.arclength_.push_back(0.0);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double h = (knots[i + 1] - knots[i]) / kSubdivisions;
    for (int j = 0; j < kSubdivisions; ++j) {
      const double u0 = knots[i] + j * h;
      const double mid = u0 + 0.5 * h;
      double len = 0.0;
      for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
        len += kGaussWeights[g] * speed(mid + 0.5 * h * kGaussNodes[g]);
      }
      len *= 0.5 * h;
      const double u1 = j + 1 == kSubdivisions ? knots[i + 1] : u0 + h;
      path.params_.push_back(u1);
      path.arclength_.push_back(path.arclength_.back() + len);
    }
  }
  for (std::size_t i = 1; i < path.arclength_.size(); ++i) {
    if (!(path.arclength_[i] > path.arclength_[i - 1])) {
      throw Error(ErrorKind::kBadWaypoints, "arclength table is not strictly increasing");
    }
  }

  path.headings_.resize(grid);
  path.curvatures_.resize(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double u = path.params_[i];
    const double dx = path.sx_.first_derivative(u);
    const double dy = path.sy_.first_derivative(u);
    const double ddx = path.sx_.second_derivative(u);
    const double ddy = path.sy_.second_derivative(u);
    path.headings_[i] = std::atan2(dy, dx);
    path.curvatures_[i] = (dx * ddy - dy * ddx) / std::pow(dx * dx + dy * dy, 1.5);
  }

  std::sort(section_boundaries.begin(), section_boundaries.end());
  path.section_boundaries_ = std::move(section_boundaries);
  return path;
}

double ReferencePath::param_at(double station) const {
  const double s = std::clamp(station, 0.0, length());
  auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  std::size_t i = it == arclength_.begin() ? 0 : static_cast<std::size_t>(it - arclength_.begin()) - 1;
  i = std::min(i, arclength_.size() - 2);
  const double frac = (s - arclength_[i]) / (arclength_[i + 1] - arclength_[i]);
  return params_[i] + frac * (params_[i + 1] - params_[i]);
}

double ReferencePath::station_at(double param) const {
  const double u = std::clamp(param, params_.front(), params_.back());
  auto it = std::upper_bound(params_.begin(), params_.end(), u);
  std::size_t i = it == params_.begin() ? 0 : static_cast<std::size_t>(it - params_.begin()) - 1;
  i = std::min(i, params_.size() - 2);
  const double frac = (u - params_[i]) / (params_[i + 1] - params_[i]);
  return arclength_[i] + frac * (arclength_[i + 1] - arclength_[i]);
}

Point2 ReferencePath::position(double station) const {
  const double u = param_at(station);
  return {sx_.value(u), sy_.value(u)};
}

double ReferencePath::heading(double station) const {
  const double u = param_at(station);
  return std::atan2(sy_.first_derivative(u), sx_.first_derivative(u));
}

double ReferencePath::curvature(double station) const {
  const double u = param_at(station);
  const double dx = sx_.first_derivative(u);
  const double dy = sy_.first_derivative(u);
  const double ddx = sx_.second_derivative(u);
  const double ddy = sy_.second_derivative(u);
  return (dx * ddy - dy * ddx) / std::pow(dx * dx + dy * dy, 1.5);
}

int ReferencePath::section_at(double station) const {
  if (section_boundaries_.empty()) return 1;
  const auto passed = std::upper_bound(section_boundaries_.begin(), section_boundaries_.end(), station) -
                      section_boundaries_.begin();
  return std::min<int>(static_cast<int>(passed) + 1, section_count());
}

int ReferencePath::section_count() const {
  return section_boundaries_.empty() ? 1 : static_cast<int>(section_boundaries_.size());
}

double ReferencePath::project(const Point2& p, double lo, double hi) const {
  lo = std::clamp(lo, 0.0, length());
  hi = std::clamp(hi, lo, length());
  const double u_lo = param_at(lo);
  const double u_hi = param_at(hi);

  auto dist2 = [&](double u) {
    const double dx = sx_.value(u) - p.x;
    const double dy = sy_.value(u) - p.y;
    return dx * dx + dy * dy;
  };

  // Coarse scan over the dense grid inside the window.
  const auto first = std::lower_bound(params_.begin(), params_.end(), u_lo) - params_.begin();
  const auto last = std::upper_bound(params_.begin(), params_.end(), u_hi) - params_.begin();
  double best_u = u_lo;
  double best_d = dist2(u_lo);
  for (auto i = first; i < last; ++i) {
    const double d = dist2(params_[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best_u = params_[static_cast<std::size_t>(i)];
    }
  }
  if (dist2(u_hi) < best_d) best_u = u_hi;

  // Newton refinement on (r(u) - p) . r'(u) = 0.
  double u = best_u;
  for (int it = 0; it < 20; ++it) {
    const double rx = sx_.value(u) - p.x;
    const double ry = sy_.value(u) - p.y;
    const double dx = sx_.first_derivative(u);
    const double dy = sy_.first_derivative(u);
    const double ddx = sx_.second_derivative(u);
    const double ddy = sy_.second_derivative(u);
    const double f = rx * dx + ry * dy;
    const double df = dx * dx + dy * dy + rx * ddx + ry * ddy;
    if (!(df > 0.0)) break;
    const double next = std::clamp(u - f / df, u_lo, u_hi);
    if (std::abs(next - u) < 1e-14 * (1.0 + std::abs(u))) {
      u = next;
      break;
    }
    u = next;
  }
  if (dist2(u) > dist2(best_u)) u = best_u;
  return station_at(u);
}

namespace {

constexpr double kBackwardSlack = 1.0;  // m
constexpr double kForwardWindow = 30.0;  // m

TrackingError error_at(const VehicleState& state, const ReferencePath& path, double station) {
  if (station >= path.length() - 1e-9) {
    throw Error(ErrorKind::kPathExhausted, "foot point reached the end of the path");
  }
  const Point2 foot = path.position(station);
  const double psi = path.heading(station);
  const double dx = state.pos_x - foot.x;
  const double dy = state.pos_y - foot.y;
  TrackingError e;
  e.lateral = std::cos(psi) * dy - std::sin(psi) * dx;
  e.heading = wrap_angle(state.yaw - psi);
  e.station = station;
  return e;
}

}  // namespace

TrackingError tracking_error(const VehicleState& state, const ReferencePath& path,
                             double prev_station) {
  const double lo = prev_station - kBackwardSlack;
  const double hi = prev_station + std::max(kForwardWindow, 3.0 * std::abs(state.vx));
  const double s = path.project({state.pos_x, state.pos_y}, lo, hi);
  return error_at(state, path, std::max(s, lo));
}

TrackingError initial_tracking_error(const VehicleState& state, const ReferencePath& path) {
  const double s = path.project({state.pos_x, state.pos_y}, 0.0, path.length());
  return error_at(state, path, s);
}

TransitionFeatures lookahead_target(const VehicleState& state, const ReferencePath& path,
                                    double station, double window) {
  const double target_s = station + state.vx * window;
  if (target_s > path.length()) {
    throw Error(ErrorKind::kPathExhausted, "lookahead point beyond the end of the path");
  }
  const Point2 p = path.position(target_s);
  const double dx = p.x - state.pos_x;
  const double dy = p.y - state.pos_y;
  const double c = std::cos(state.yaw);
  const double s = std::sin(state.yaw);
  TransitionFeatures t;
  t.dy_body = -s * dx + c * dy;
  t.dpsi = wrap_angle(path.heading(target_s) - state.yaw);
  return t;
}

VehicleState state_on_path(const ReferencePath& path, double station, double vx) {
  const Point2 p = path.position(station);
  VehicleState s;
  s.pos_x = p.x;
  s.pos_y = p.y;
  s.yaw = wrap_angle(path.heading(station));
  s.vx = vx;
  return s;
}

}  // namespace llpl::sim
