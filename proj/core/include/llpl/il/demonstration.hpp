#pragma once

#include <cstdint>
#include <vector>

#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::il {

/// Synthetic excitation driver. It never tracks a path; it just sweeps the
/// steering range at each cruise speed.
struct DemoOptions {
  std::vector<double> speeds{5.0, 10.0, 15.0, 20.0};  // m/s
  double duration_per_speed = 150.0;                   // s
  int sinusoids = 3;
  double freq_min = 0.05;  // Hz
  double freq_max = 0.5;   // Hz
  double amp_min = 0.02;   // fraction of steer_limit
  double amp_max = 0.3;    // fraction of steer_limit
  double noise_std = 0.02;  // fraction of steer_limit, stationary std of the filtered noise
  double noise_cutoff = 1.0;  // Hz, first-order low-pass
};

/// Open-loop log: per speed, steering is the clipped, rate-limited sum of
/// seeded sinusoids plus low-passed Gaussian noise. Pose, vy and yaw rate are
/// reset between speeds; each speed is tagged as its own section (1-based).
sim::DrivingLog generate_demonstration(const sim::VehicleParams& params, const sim::SimConfig& cfg,
                                       const DemoOptions& options, std::uint64_t seed);

}  // namespace llpl::il
