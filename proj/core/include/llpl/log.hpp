#pragma once

#include <string_view>

namespace llpl::log {

enum class Level { kError, kInfo, kDebug };

// Reads LLPL_LOG (error|info|debug). Unset or unknown values mean "info".
void init_from_env();
void set_level(Level level);

void error(std::string_view msg);
void warn(std::string_view msg);
void info(std::string_view msg);
void debug(std::string_view msg);

}  // namespace llpl::log
