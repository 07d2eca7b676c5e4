#pragma once

#include <cstdint>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/lifelong/loop.hpp"
#include "llpl/lifelong/memory.hpp"

namespace llpl::baselines {

/// No screening: every execution sample trains the policy, and the memory
/// grows by ceil(sample_ratio * N) samples drawn uniformly without
/// replacement from each execution's N samples.
lifelong::KnowledgeRule random_sampling_rule(double sample_ratio);

/// Memory holding ceil(sample_ratio * N) uniformly drawn demonstration samples.
/// Throws Error(kEmptyDataset).
lifelong::EpisodicMemory random_memory(const il::Dataset& demonstration, double sample_ratio,
                                       const nn::Normalizer& normalizer, std::uint64_t seed);

/// The lifelong loop with random_sampling_rule in place of knowledge evaluation.
lifelong::LoopResult run_lll_baseline(il::Policy& policy, lifelong::EpisodicMemory& memory,
                                      const lifelong::Environment& env,
                                      const lifelong::Schedule& schedule,
                                      lifelong::LoopOptions options, double sample_ratio = 0.10);

}  // namespace llpl::baselines
