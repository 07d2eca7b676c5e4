#pragma once

#include <cstdint>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/lifelong/memory.hpp"

namespace llpl::lifelong {

struct UpdateReport {
  std::size_t n_data = 0;
  std::size_t steps = 0;
  std::size_t projected_steps = 0;
  double loss_data_pre = 0.0;
  double loss_data_post = 0.0;
  double loss_mem_pre = 0.0;   // on a fixed held-out memory batch
  double loss_mem_post = 0.0;
  double wall_s = 0.0;

  double projection_rate() const {
    return steps == 0 ? 0.0 : static_cast<double>(projected_steps) / static_cast<double>(steps);
  }
};

/// Gradient-episodic-memory fine-tuning of the policy on already screened
/// data. Every SGD step projects the minibatch gradient against a reference
/// gradient from a fresh random memory batch. Inputs go through the policy's
/// normalizer.
///
/// With `project` false the reference gradient is ignored (plain SGD), which
/// is only useful as a forgetting control.
///
/// Throws Error(kEmptyDataset), Error(kEmptyMemory). A non-finite loss rolls
/// the policy back to its pre-update parameters and throws Error(kNonFiniteLoss).
UpdateReport lifelong_update(il::Policy& policy, const il::Dataset& data,
                             const EpisodicMemory& memory, const EvalConfig& cfg,
                             std::uint64_t seed, bool project = true);

}  // namespace llpl::lifelong
