#pragma once

#include <string>
#include <vector>

#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/il/train.hpp"
#include "llpl/lifelong/loop.hpp"

namespace llpl::baselines {

struct RetrainLegOutcome {
  std::string label;
  sim::DrivingLog log;
  bool off_path = false;
  bool retrained = false;
  std::size_t train_size = 0;  // samples in the retraining set after this leg
  double train_loss = 0.0;
  double train_wall_s = 0.0;
};

struct RetrainResult {
  std::vector<RetrainLegOutcome> legs;
  il::Policy final_policy;
  std::size_t restarts = 0;
};

/// Offline retraining baseline. The first leg is driven by `trained`; after
/// every leg with an update trigger the policy is retrained from the
/// parameters of `untrained` on the demonstration plus all execution samples
/// collected so far. The normalizer of `trained` is kept throughout.
RetrainResult run_il_retrain_baseline(const il::Policy& untrained, const il::Policy& trained,
                                      const il::Dataset& demonstration,
                                      const lifelong::Environment& env,
                                      const lifelong::Schedule& schedule,
                                      const il::TrainOptions& options);

}  // namespace llpl::baselines
