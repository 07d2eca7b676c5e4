#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "llpl/sim/simulator.hpp"

namespace llpl::harness {

/// Tracking statistics of one trajectory log.
struct TrajectoryMetrics {
  double rmse_e_lat = 0.0;      // m
  double rmse_e_head = 0.0;     // rad
  double mean_abs_e_lat = 0.0;  // m
  double control_effort = 0.0;  // sum of steer^2 * T
  double steer_rate_rms = 0.0;  // rad/s, over consecutive records of the log
  std::size_t steps = 0;
};

TrajectoryMetrics trajectory_metrics(const sim::DrivingLog& log);

/// One epoch (revisit pass) or section of a run.
struct EpochSummary {
  std::string label;
  TrajectoryMetrics metrics;
  std::int64_t mem_size = 0;       // memory, replay or retraining set size after the epoch
  std::int64_t mem_increment = 0;  // change of mem_size over the epoch
  std::int64_t screened_count = 0;
  double update_wall_s = 0.0;
  bool off_path = false;
  std::string trajectory;  // trajectory CSV file name, relative to the run directory
};

struct RunSummary {
  std::string method;
  std::vector<EpochSummary> epochs;

  bool any_off_path() const;
};

/// CSV: method,epoch,rmse_e_lat,rmse_e_head,mean_abs_e_lat,control_effort,
/// steer_rate_rms,steps,mem_size,mem_increment,screened_count,update_wall_s,
/// off_path,trajectory
void write_summary_csv(const std::filesystem::path& file, const RunSummary& summary);
/// Throws Error(kMissingRun) if absent, Error(kIo) if malformed.
RunSummary read_summary_csv(const std::filesystem::path& file);

struct ComparisonRow {
  std::string method;
  std::string epoch;
  double rmse_e_lat = 0.0;
  double rmse_e_head = 0.0;
  double effort = 0.0;
  std::int64_t mem_size = 0;
  double pct_vs_baseline = 0.0;  // RMSE(e_lat) reduction relative to the baseline, percent
};

/// Joins runs on the epoch label. pct_vs_baseline is
/// 100 (baseline - rmse) / baseline, NaN where the baseline lacks the epoch.
std::vector<ComparisonRow> compare_summaries(const std::vector<RunSummary>& runs,
                                             std::size_t baseline);

/// CSV: method,epoch,rmse_e_lat,rmse_e_head,effort,mem_size,pct_vs_baseline
void write_comparison_csv(const std::filesystem::path& file, const std::vector<ComparisonRow>& rows);

}  // namespace llpl::harness
