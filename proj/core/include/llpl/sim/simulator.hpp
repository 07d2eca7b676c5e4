#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "llpl/sim/path.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::sim {

/// One control period of a log: the state at time t and the steer held until t + T.
struct LogRecord {
  double t = 0.0;
  VehicleState state;
  double steer = 0.0;
  double e_lat = 0.0;
  double e_head = 0.0;
  int section = 0;
};

/// Time-ordered records at a uniform period. Runs of equal `section` are
/// treated as contiguous segments; windows never straddle two segments.
struct DrivingLog {
  double period = 0.1;
  std::vector<LogRecord> records;
};

/// CSV schema: t_s,pos_x,pos_y,yaw,vx,vy,yaw_rate,steer,e_lat,e_head,section
void write_log_csv(const std::filesystem::path& file, const DrivingLog& log);
DrivingLog read_log_csv(const std::filesystem::path& file, double period);

struct ControlContext {
  const VehicleState& state;
  const TrackingError& error;
  const ReferencePath& path;
  double prev_steer;
  double time;
};

/// Steering law evaluated once per control period.
using Controller = std::function<double(const ControlContext&)>;

/// A stretch of path driven at a constant cruise speed.
struct Leg {
  double start_station = 0.0;
  double end_station = 0.0;
  double speed = 12.0;
};

struct LegResult {
  DrivingLog log;
  VehicleState final_state;
  double final_station = 0.0;
  double final_steer = 0.0;
  double end_time = 0.0;
  bool off_path = false;
};

struct LegOptions {
  double off_path_limit = 10.0;  // m
};

/// Drives `leg` from `start` with `controller`. Stops at end_station, when the
/// lookahead window would run off the path, or when |e_lat| exceeds the
/// off-path limit (flagged, log kept).
LegResult run_leg(const ReferencePath& path, const Leg& leg, const VehicleState& start,
                  double start_station, double start_steer, double start_time,
                  const Controller& controller, const VehicleParams& params, const SimConfig& cfg,
                  const LegOptions& options = {});

}  // namespace llpl::sim
