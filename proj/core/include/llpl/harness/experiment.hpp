#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "llpl/harness/config.hpp"
#include "llpl/harness/summary.hpp"
#include "llpl/il/policy.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/il/train.hpp"
#include "llpl/lifelong/loop.hpp"
#include "llpl/lifelong/memory.hpp"
#include "llpl/nn/normalizer.hpp"
#include "llpl/sim/path.hpp"
#include "llpl/sim/simulator.hpp"

namespace llpl::harness {

struct DemoArtifacts {
  sim::DrivingLog log;
  il::Dataset data;
  nn::Normalizer normalizer;
};

/// Generates the demonstration log, extracts its samples and fits the normalizer.
DemoArtifacts make_demo(const ExperimentConfig& cfg);

/// Extraction and normalizer fit for an existing log.
DemoArtifacts demo_from_log(const ExperimentConfig& cfg, sim::DrivingLog log);

/// Adds Gaussian noise to the logged vy, yaw rate and steer. Pose and errors
/// are left alone. A disabled config returns the log unchanged.
sim::DrivingLog corrupt_log(const sim::DrivingLog& log, const NoiseConfig& noise, std::uint64_t seed);

struct TrainedPolicy {
  il::Policy untrained;  // seeded initialization, already carrying the fitted normalizer
  il::Policy policy;
  il::TrainReport report;
};

TrainedPolicy train_policy(const ExperimentConfig& cfg, const DemoArtifacts& demo);

sim::ReferencePath build_path(const ExperimentConfig& cfg);
lifelong::Schedule build_schedule(const ExperimentConfig& cfg, const sim::ReferencePath& path);
lifelong::Environment make_environment(const ExperimentConfig& cfg, const sim::ReferencePath& path);

struct RunOutcome {
  RunSummary summary;
  std::vector<sim::DrivingLog> logs;  // parallel to summary.epochs
  std::optional<il::Policy> final_policy;
  std::optional<lifelong::EpisodicMemory> memory;
  std::optional<lifelong::LoopResult> loop;  // llpl and lll; leg logs moved into `logs`
  std::vector<il::Policy> leg_policies;      // llpl and lll: policy after each leg's update
  std::size_t restarts = 0;  // legs restarted on the path after an off-path leg
  bool non_finite = false;
};

/// Runs cfg.method over the configured scenario and schedule. With noise
/// enabled, llpl and lll learn from corrupted copies of their execution logs.
RunOutcome run_experiment(const ExperimentConfig& cfg, const DemoArtifacts& demo,
                          const TrainedPolicy& trained);

/// Writes one trajectory CSV per epoch, fills in the summary's trajectory
/// column and writes summary.csv, plus update_reports.csv, memory.csv,
/// policy_<label>.ckpt per leg and final_policy.ckpt where the run produced them.
void write_run_outputs(const std::filesystem::path& dir, RunOutcome& run);

void write_normalizer_csv(const std::filesystem::path& file, const nn::Normalizer& normalizer);
nn::Normalizer read_normalizer_csv(const std::filesystem::path& file);

}  // namespace llpl::harness
