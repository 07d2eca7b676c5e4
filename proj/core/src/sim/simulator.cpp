#include "llpl/sim/simulator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "llpl/error.hpp"
#include "llpl/log.hpp"

namespace llpl::sim {

void write_log_csv(const std::filesystem::path& file, const DrivingLog& log) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "t_s,pos_x,pos_y,yaw,vx,vy,yaw_rate,steer,e_lat,e_head,section\n";
  for (const auto& r : log.records) {
    out << r.t << ',' << r.state.pos_x << ',' << r.state.pos_y << ',' << r.state.yaw << ','
        << r.state.vx << ',' << r.state.vy << ',' << r.state.yaw_rate << ',' << r.steer << ','
        << r.e_lat << ',' << r.e_head << ',' << r.section << '\n';
  }
}

DrivingLog read_log_csv(const std::filesystem::path& file, double period) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot open log " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != "t_s,pos_x,pos_y,yaw,vx,vy,yaw_rate,steer,e_lat,e_head,section") {
    throw Error(ErrorKind::kIo, "unexpected log header in " + file.string());
  }
  DrivingLog log;
  log.period = period;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    LogRecord r;
    char c = 0;
    row >> r.t >> c >> r.state.pos_x >> c >> r.state.pos_y >> c >> r.state.yaw >> c >> r.state.vx >>
        c >> r.state.vy >> c >> r.state.yaw_rate >> c >> r.steer >> c >> r.e_lat >> c >> r.e_head >>
        c >> r.section;
    if (!row) throw Error(ErrorKind::kIo, "malformed log row in " + file.string());
    log.records.push_back(r);
  }
  return log;
}

LegResult run_leg(const ReferencePath& path, const Leg& leg, const VehicleState& start,
                  double start_station, double start_steer, double start_time,
                  const Controller& controller, const VehicleParams& params, const SimConfig& cfg,
                  const LegOptions& options) {
  LegResult result;
  result.log.period = cfg.control_period;

  VehicleState state = start;
  state.vx = leg.speed;
  double station = start_station;
  double steer = start_steer;
  double t = start_time;
  const int section = path.section_at(leg.start_station + 1e-9);

  while (true) {
    TrackingError err;
    try {
      err = tracking_error(state, path, station);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kPathExhausted) throw;
      break;
    }
    station = err.station;
    if (station >= leg.end_station) break;
    if (station + state.vx * cfg.horizon_window > path.length()) break;
    if (std::abs(err.lateral) > options.off_path_limit) {
      result.off_path = true;
      log::info("vehicle left the path (|e_lat| > " + std::to_string(options.off_path_limit) +
                " m) at station " + std::to_string(station));
      break;
    }

    steer = controller(ControlContext{state, err, path, steer, t});

    LogRecord rec;
    rec.t = t;
    rec.state = state;
    rec.steer = steer;
    rec.e_lat = err.lateral;
    rec.e_head = err.heading;
    rec.section = section;
    result.log.records.push_back(rec);

    state = advance_control_period(state, steer, params, cfg);
    t += cfg.control_period;
  }

  result.final_state = state;
  result.final_station = station;
  result.final_steer = steer;
  result.end_time = t;
  return result;
}

}  // namespace llpl::sim
