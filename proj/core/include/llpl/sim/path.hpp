#pragma once

#include <cstddef>
#include <vector>

#include "llpl/sim/vehicle.hpp"

namespace llpl::sim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Natural cubic spline y(t) over strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  double value(double t) const;
  double first_derivative(double t) const;
  double second_derivative(double t) const;

  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

 private:
  std::size_t interval(double t) const;

  std::vector<double> knots_;
  // y = a + b dt + c dt^2 + d dt^3 on each interval
  std::vector<double> a_, b_, c_, d_;
};

/// Signed tracking error of a vehicle against a path.
struct TrackingError {
  double lateral = 0.0;  // m, left of path positive
  double heading = 0.0;  // rad, vehicle yaw minus path heading, wrapped
  double station = 0.0;  // m, arclength of the foot point
};

/// Receding-horizon target in the body frame of the current state.
struct TransitionFeatures {
  double dy_body = 0.0;  // m
  double dpsi = 0.0;     // rad, wrapped
};

/// Arclength-parameterized C2 path through waypoints. The spline runs over a
/// chord-length parameter; a dense monotone table maps it to arclength.
class ReferencePath {
 public:
  /// Throws Error(kBadWaypoints) on fewer than 4 points or repeated points.
  static ReferencePath from_waypoints(const std::vector<Point2>& waypoints,
                                      std::vector<double> section_boundaries = {});

  double length() const { return arclength_.back(); }

  Point2 position(double station) const;
  double heading(double station) const;
  double curvature(double station) const;

  /// 1-based section index of a station: 1 + number of boundaries <= station,
  /// capped at the number of boundaries.
  int section_at(double station) const;
  int section_count() const;

  const std::vector<Point2>& waypoints() const { return waypoints_; }
  const std::vector<double>& arclength_table() const { return arclength_; }
  const std::vector<double>& headings() const { return headings_; }
  const std::vector<double>& curvatures() const { return curvatures_; }
  const std::vector<double>& section_boundaries() const { return section_boundaries_; }

  /// Nearest point search restricted to stations in [lo, hi]. Returns the
  /// station of the foot point.
  double project(const Point2& p, double lo, double hi) const;

 private:
  double param_at(double station) const;
  double station_at(double param) const;

  std::vector<Point2> waypoints_;
  CubicSpline sx_, sy_;
  std::vector<double> params_;     // dense parameter grid
  std::vector<double> arclength_;  // arclength at each grid parameter
  std::vector<double> headings_;
  std::vector<double> curvatures_;
  std::vector<double> section_boundaries_;
};

/// Tracking error with a windowed foot-point search around prev_station. The
/// station never decreases by more than 1 m. Throws Error(kPathExhausted) once
/// the foot point reaches the end of the path.
TrackingError tracking_error(const VehicleState& state, const ReferencePath& path,
                             double prev_station);

/// Same as tracking_error but with a global foot-point search; used at episode start.
TrackingError initial_tracking_error(const VehicleState& state, const ReferencePath& path);

/// Path point at station + vx * window expressed in the body frame of state.
/// Throws Error(kPathExhausted) if that point lies beyond the path end.
TransitionFeatures lookahead_target(const VehicleState& state, const ReferencePath& path,
                                    double station, double window);

/// Vehicle state sitting exactly on the path at the given station, aligned
/// with the path heading, at speed vx with zero lateral motion.
VehicleState state_on_path(const ReferencePath& path, double station, double vx);

}  // namespace llpl::sim
