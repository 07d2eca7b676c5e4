#pragma once

// Shared, lazily built test inputs. Building them once keeps the unit suite fast.

#include <filesystem>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/nn/normalizer.hpp"
#include "llpl/sim/simulator.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::testing {

struct SmallWorld {
  sim::VehicleParams params;
  sim::SimConfig sim;
  sim::DrivingLog demo_log;
  il::Dataset demo;
  nn::Normalizer normalizer;
  il::Policy policy;  // briefly trained on `demo`
};

/// Two speeds (8 and 14 m/s), 60 s each, seed 3; policy trained for 30 epochs.
const SmallWorld& small_world();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace llpl::testing
