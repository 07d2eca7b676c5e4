#include "llpl/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "llpl/error.hpp"

namespace llpl::sim {

ScenarioId parse_scenario_id(const std::string& name) {
  if (name == "double_lane_change") return ScenarioId::kDoubleLaneChange;
  if (name == "curved_road") return ScenarioId::kCurvedRoad;
  if (name == "from_waypoints") return ScenarioId::kFromWaypoints;
  throw Error(ErrorKind::kConfig, "unknown scenario '" + name + "'");
}

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::kDoubleLaneChange: return "double_lane_change";
    case ScenarioId::kCurvedRoad: return "curved_road";
    case ScenarioId::kFromWaypoints: return "from_waypoints";
  }
  return "unknown";
}

ReferencePath make_double_lane_change(double lane_offset) {
  constexpr double kEntry = 50.0;
  constexpr double kShift = 30.0;
  constexpr double kHold = 25.0;
  constexpr double kExit = 50.0;
  constexpr double kTotal = kEntry + kShift + kHold + kShift + kExit;
  constexpr double kSpacing = 1.0;

  auto blend = [](double u) { return 0.5 * (1.0 - std::cos(std::numbers::pi * u)); };
  auto offset = [&](double x) {
    if (x <= kEntry) return 0.0;
    if (x <= kEntry + kShift) return lane_offset * blend((x - kEntry) / kShift);
    if (x <= kEntry + kShift + kHold) return lane_offset;
    if (x <= kEntry + 2 * kShift + kHold) {
      return lane_offset * (1.0 - blend((x - kEntry - kShift - kHold) / kShift));
    }
    return 0.0;
  };

  std::vector<Point2> pts;
  const int n = static_cast<int>(std::lround(kTotal / kSpacing));
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * kSpacing;
    pts.push_back({x, offset(x)});
  }
  return ReferencePath::from_waypoints(pts);
}

namespace {

// Appends a piece of linearly varying curvature from k0 to k1 over length.
void append_ramp(std::vector<double>& kappa, double ds, double length, double k0, double k1) {
  const int n = static_cast<int>(std::lround(length / ds));
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    kappa.push_back(k0 + (k1 - k0) * u);
  }
}

}  // namespace

std::vector<double> curved_road_curvature_profile(const ScenarioParams& params, double ds) {
  std::mt19937_64 rng(params.road_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<double> kappa;
  double sign = 1.0;
  for (int sec = 0; sec < params.sections; ++sec) {
    const bool sharp = sec < params.sharp_sections;
    const double k_hi = sharp ? params.sharp_curvature_max : params.gentle_curvature_max;
    const double k_lo = sharp ? 0.5 * params.sharp_curvature_max : 0.4 * params.gentle_curvature_max;
    const std::size_t section_end =
        static_cast<std::size_t>(std::lround((sec + 1) * params.section_length / ds));

    // Leading straight so every section starts and ends at zero curvature.
    append_ramp(kappa, ds, sharp ? 30.0 : 60.0, 0.0, 0.0);
    while (true) {
      const double straight = sharp ? draw(20.0, 60.0) : draw(40.0, 120.0);
      const double ramp = sharp ? draw(25.0, 40.0) : draw(50.0, 90.0);
      const double arc = sharp ? draw(50.0, 130.0) : draw(120.0, 260.0);
      const double k = sign * draw(k_lo, k_hi);
      const double needed = straight + 2.0 * ramp + arc;
      if (kappa.size() + static_cast<std::size_t>(std::lround(needed / ds)) + 1 > section_end) break;
      append_ramp(kappa, ds, straight, 0.0, 0.0);
      append_ramp(kappa, ds, ramp, 0.0, k);
      append_ramp(kappa, ds, arc, k, k);
      append_ramp(kappa, ds, ramp, k, 0.0);
      sign = -sign;
    }
    while (kappa.size() < section_end) kappa.push_back(0.0);
  }
  append_ramp(kappa, ds, params.run_out, 0.0, 0.0);
  return kappa;
}

ReferencePath make_curved_road(const ScenarioParams& params) {
  constexpr double kStep = 0.1;
  constexpr double kWaypointSpacing = 5.0;
  const std::vector<double> kappa = curved_road_curvature_profile(params, kStep);

  const int every = static_cast<int>(std::lround(kWaypointSpacing / kStep));
  std::vector<Point2> pts;
  pts.reserve(kappa.size() / static_cast<std::size_t>(every) + 2);
  double x = 0.0, y = 0.0, psi = 0.0;
  pts.push_back({x, y});
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double mid = psi + 0.5 * kappa[i] * kStep;
    x += std::cos(mid) * kStep;
    y += std::sin(mid) * kStep;
    psi += kappa[i] * kStep;
    if ((i + 1) % static_cast<std::size_t>(every) == 0) pts.push_back({x, y});
  }

  std::vector<double> boundaries;
  for (int sec = 1; sec <= params.sections; ++sec) boundaries.push_back(sec * params.section_length);
  return ReferencePath::from_waypoints(pts, std::move(boundaries));
}

std::vector<Point2> read_waypoints_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kIo, "cannot open waypoint file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kBadWaypoints, "empty waypoint file");
  if (line.rfind("x_m,y_m", 0) != 0) {
    throw Error(ErrorKind::kBadWaypoints, "waypoint header must be 'x_m,y_m'");
  }
  std::vector<Point2> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    Point2 p;
    char comma = 0;
    if (!(row >> p.x >> comma >> p.y) || comma != ',') {
      throw Error(ErrorKind::kBadWaypoints, "malformed waypoint at line " + std::to_string(lineno));
    }
    pts.push_back(p);
  }
  return pts;
}

void write_waypoints_csv(const std::filesystem::path& file, const std::vector<Point2>& points) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + file.string());
  out.precision(17);
  out << "x_m,y_m\n";
  for (const auto& p : points) out << p.x << ',' << p.y << '\n';
}

ReferencePath build_scenario(ScenarioId id, const ScenarioParams& params) {
  switch (id) {
    case ScenarioId::kDoubleLaneChange: return make_double_lane_change(params.lane_offset);
    case ScenarioId::kCurvedRoad: return make_curved_road(params);
    case ScenarioId::kFromWaypoints:
      return ReferencePath::from_waypoints(read_waypoints_csv(params.waypoint_csv));
  }
  throw Error(ErrorKind::kConfig, "unhandled scenario");
}

}  // namespace llpl::sim
