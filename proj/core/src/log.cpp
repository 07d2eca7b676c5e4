#include "llpl/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "llpl/error.hpp"

namespace llpl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNonFiniteState: return "NonFiniteState";
    case ErrorKind::kPathExhausted: return "PathExhausted";
    case ErrorKind::kBadWaypoints: return "BadWaypoints";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::kLogTooShort: return "LogTooShort";
    case ErrorKind::kEmptyDataset: return "EmptyDataset";
    case ErrorKind::kEmptyMemory: return "EmptyMemory";
    case ErrorKind::kSpeedTooLow: return "SpeedTooLow";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kOffPath: return "OffPath";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kMissingArtifact: return "MissingArtifact";
    case ErrorKind::kMissingRun: return "MissingRun";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

namespace log {
namespace {

spdlog::logger& logger() {
  static auto instance = [] {
    auto l = spdlog::stderr_color_mt("llpl");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::info);
    return l;
  }();
  return *instance;
}

}  // namespace

void set_level(Level level) {
  switch (level) {
    case Level::kError: logger().set_level(spdlog::level::err); break;
    case Level::kInfo: logger().set_level(spdlog::level::info); break;
    case Level::kDebug: logger().set_level(spdlog::level::debug); break;
  }
}

void init_from_env() {
  const char* env = std::getenv("LLPL_LOG");
  const std::string value = env ? env : "info";
  if (value == "error") {
    set_level(Level::kError);
  } else if (value == "debug") {
    set_level(Level::kDebug);
  } else {
    set_level(Level::kInfo);
  }
}

void error(std::string_view msg) { logger().error("{}", msg); }
void warn(std::string_view msg) { logger().warn("{}", msg); }
void info(std::string_view msg) { logger().info("{}", msg); }
void debug(std::string_view msg) { logger().debug("{}", msg); }

}  // namespace log
}  // namespace llpl
