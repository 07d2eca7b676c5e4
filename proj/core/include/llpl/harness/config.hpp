#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "llpl/baselines/mpc.hpp"
#include "llpl/baselines/rl.hpp"
#include "llpl/il/demonstration.hpp"
#include "llpl/il/sample.hpp"
#include "llpl/il/train.hpp"
#include "llpl/lifelong/memory.hpp"
#include "llpl/sim/scenario.hpp"
#include "llpl/sim/vehicle.hpp"

namespace llpl::harness {

enum class Method { kIl, kLlpl, kLll, kIlRetrain, kRl, kMpc };

Method parse_method(const std::string& name);
std::string to_string(Method m);

enum class Protocol { kRevisit, kSections, kFixedDuration };

Protocol parse_protocol(const std::string& name);
std::string to_string(Protocol p);

struct ScheduleConfig {
  Protocol protocol = Protocol::kRevisit;
  int epochs = 6;        // revisit passes
  bool update_after_last = true;  // also update after the final pass
  double speed = 12.0;   // m/s, revisit and fixed-duration protocols
  std::vector<double> section_speeds{12.0, 12.0, 12.0, 20.0, 20.0, 20.0, 20.0};
  double update_duration = 16.0;  // s, fixed-duration protocol
};

/// Gaussian corruption of logged measurements used for training.
struct NoiseConfig {
  double sigma_vy = 0.0;         // m/s
  double sigma_yaw_rate = 0.0;   // rad/s
  double sigma_steer_log = 0.0;  // rad
  bool corrupt_demonstration = true;

  bool enabled() const { return sigma_vy > 0.0 || sigma_yaw_rate > 0.0 || sigma_steer_log > 0.0; }
};

struct ExperimentConfig {
  Method method = Method::kLlpl;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::filesystem::path artifact_dir;  // empty: same as output_dir

  sim::ScenarioId scenario = sim::ScenarioId::kDoubleLaneChange;
  sim::ScenarioParams scenario_params;
  ScheduleConfig schedule;

  sim::VehicleParams vehicle;
  sim::SimConfig sim;
  double off_path_limit = 10.0;  // m

  il::DemoOptions demo;
  il::ExtractOptions extract;
  il::TrainOptions il;

  lifelong::EvalConfig llpl;
  std::size_t memory_capacity = 0;  // 0: unbounded
  double lll_sample_ratio = 0.10;

  baselines::MpcConfig mpc;
  baselines::RlConfig rl;
  NoiseConfig noise;

  std::vector<std::filesystem::path> compare_runs;
  std::string compare_baseline;  // method name of the reference run; empty: first run

  std::filesystem::path artifacts() const { return artifact_dir.empty() ? output_dir : artifact_dir; }

  /// Cross-field checks. Throws Error(kConfig).
  void validate() const;
};

/// Parses an INI file (sections of key = value). Unknown sections or keys,
/// malformed values and invalid combinations throw Error(kConfig); a missing
/// file throws Error(kConfig) too. Relative paths resolve against the working
/// directory.
ExperimentConfig load_config(const std::filesystem::path& file);

/// Same, from INI text.
ExperimentConfig parse_config(const std::string& text);

/// Every field, in a fixed order, as INI text that parse_config accepts.
std::string format_config(const ExperimentConfig& cfg);

void write_config(const std::filesystem::path& file, const ExperimentConfig& cfg);

}  // namespace llpl::harness
