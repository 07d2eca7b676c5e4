#pragma once

#include <cstdint>
#include <filesystem>

#include "llpl/il/sample.hpp"
#include "llpl/nn/mlp.hpp"
#include "llpl/nn/normalizer.hpp"
#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::il {

/// Steering policy: network plus the feature normalizer it was trained with.
struct Policy {
  nn::MlpModel model;
  nn::Normalizer normalizer;

  /// 5-64-64-1 tanh network with seeded Glorot weights and an identity normalizer.
  static Policy create(std::uint64_t seed);

  /// Unclipped network output for a state and a transition target.
  double raw_steer(const StateFeatures& state, const sim::TransitionFeatures& target) const;

  /// Network output clipped to the steering limit, then rate limited against prev_steer.
  double act(const sim::VehicleState& state, const sim::TransitionFeatures& target, double prev_steer,
             const sim::VehicleParams& params, double period) const;

  /// Builds the receding-horizon target from the path and acts on it.
  /// Error(kPathExhausted) propagates.
  double act(const sim::VehicleState& state, const sim::ReferencePath& path, double station,
             double prev_steer, const sim::VehicleParams& params, const sim::SimConfig& cfg) const;

  void save(const std::filesystem::path& file) const;
  static Policy load(const std::filesystem::path& file);
};

sim::Controller make_controller(const Policy& policy, const sim::VehicleParams& params,
                                const sim::SimConfig& cfg);

}  // namespace llpl::il
