#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::il {

inline constexpr Eigen::Index kFeatureDim = 5;

/// Body-frame motion state of the vehicle.
struct StateFeatures {
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
};

StateFeatures state_features(const sim::VehicleState& s);

/// Knowledge tuple: state, transition over the horizon window, and the steer
/// that produced it. `effort` caches steer^2.
struct Sample {
  StateFeatures state;
  sim::TransitionFeatures transition;
  double steer = 0.0;
  double effort = 0.0;

  static Sample make(const StateFeatures& state, const sim::TransitionFeatures& transition,
                     double steer);

  /// (vx, vy, yaw_rate, dy_body, dpsi). The only place the feature order is defined.
  std::array<double, kFeatureDim> features() const;
};

/// The single conversion from (state, transition) to a network input column.
Eigen::VectorXd feature_vector(const StateFeatures& state, const sim::TransitionFeatures& transition);
/// Inverse of feature_vector.
std::pair<StateFeatures, sim::TransitionFeatures> split_features(const Eigen::VectorXd& features);

struct Dataset {
  std::vector<Sample> samples;
  std::string provenance = "demonstration";

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// kFeatureDim x N matrix of raw features.
Eigen::MatrixXd feature_matrix(const std::vector<Sample>& samples);
/// 1 x N matrix of steer labels.
Eigen::MatrixXd steer_matrix(const std::vector<Sample>& samples);

struct ExtractOptions {
  // Drop windows whose steer departs from the window-start steer by more
  // than max_steer_variation.
  bool filter_steer_variation = true;
  double max_steer_variation = 0.05;  // rad
};

/// Inverse-dynamics relabeling: every window [k, k+W) inside a contiguous
/// segment of the log yields one sample whose transition is the realized pose
/// of record k+W in the body frame of record k, labeled with the steer at k.
/// Throws Error(kLogTooShort) if no segment is longer than W.
Dataset extract_samples(const sim::DrivingLog& log, int window_steps,
                        const ExtractOptions& options = {});

/// Record indices at which the windows used by extract_samples start, in log
/// order. Throws Error(kLogTooShort).
std::vector<std::size_t> window_starts(const sim::DrivingLog& log, int window_steps,
                                       const ExtractOptions& options = {});

/// Sample of the window starting at record k. The caller guarantees k + W is a
/// record of the same segment.
Sample window_sample(const sim::DrivingLog& log, std::size_t k, int window_steps);

/// Number of windows before filtering (sum over segments of N_i - W).
std::size_t count_windows(const sim::DrivingLog& log, int window_steps);

/// CSV: vx,vy,yaw_rate,dy_body,dpsi,steer (+ effort when with_effort).
void write_dataset_csv(const std::filesystem::path& file, const Dataset& data,
                       bool with_effort = false);
Dataset read_dataset_csv(const std::filesystem::path& file);

}  // namespace llpl::il
