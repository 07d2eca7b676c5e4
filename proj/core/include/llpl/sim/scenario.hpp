#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "llpl/sim/path.hpp"

namespace llpl::sim {

enum class ScenarioId { kDoubleLaneChange, kCurvedRoad, kFromWaypoints };

ScenarioId parse_scenario_id(const std::string& name);
std::string to_string(ScenarioId id);

struct ScenarioParams {
  // double_lane_change
  double lane_offset = 3.5;  // m

  // curved_road
  std::uint64_t road_seed = 7;
  int sections = 7;
  double section_length = 1000.0;  // m
  double sharp_curvature_max = 0.02;
  double gentle_curvature_max = 0.007;
  int sharp_sections = 3;
  double run_out = 80.0;  // m of straight past the last boundary

  // from_waypoints
  std::filesystem::path waypoint_csv;
};

/// ISO-3888 style lane change: 50 m straight, +offset over 30 m, 25 m hold,
/// return over 30 m, 50 m straight. 185 m of longitudinal extent.
ReferencePath make_double_lane_change(double lane_offset = 3.5);

/// Procedural road of clothoid-blended arcs, split into equal sections. The
/// first sharp_sections carry |kappa| up to sharp_curvature_max, the rest stay
/// below gentle_curvature_max.
ReferencePath make_curved_road(const ScenarioParams& params);

/// Curvature profile used by make_curved_road, sampled every ds metres.
std::vector<double> curved_road_curvature_profile(const ScenarioParams& params, double ds);

/// Reads `x_m,y_m` CSV. Throws Error(kIo) or Error(kBadWaypoints).
std::vector<Point2> read_waypoints_csv(const std::filesystem::path& file);
void write_waypoints_csv(const std::filesystem::path& file, const std::vector<Point2>& points);

ReferencePath build_scenario(ScenarioId id, const ScenarioParams& params);

}  // namespace llpl::sim
