#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "llpl/error.hpp"
#include "llpl/harness/config.hpp"

namespace llpl::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRunFailure = 3;
inline constexpr int kExitMissing = 4;

int exit_code(ErrorKind kind);

/// Each command writes its resolved config to <output_dir>/config.ini and
/// returns a process exit code. Errors propagate as llpl::Error.
int cmd_demo_gen(const ExperimentConfig& cfg);
int cmd_train_il(const ExperimentConfig& cfg);
int cmd_run(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);
int cmd_noise_replay(const ExperimentConfig& cfg);

struct CommandLine {
  std::string command;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Loads the config, applies overrides, dispatches, and maps errors onto exit codes.
int run_command(const CommandLine& cl);

}  // namespace llpl::harness
