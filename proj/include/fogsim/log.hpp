#pragma once

#include <string_view>

namespace fogsim {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level comes from the FOGSIM_LOG environment variable
/// (error|warn|info|debug); default warn. Read once per process.
LogLevel log_level();

void log_error(std::string_view msg);
void log_warn(std::string_view msg);
void log_info(std::string_view msg);
void log_debug(std::string_view msg);

}  // namespace fogsim
