#include "fogsim/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace fogsim {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("FOGSIM_LOG");
    if (!env) return LogLevel::Warn;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

namespace {
void emit(LogLevel at, const char* tag, std::string_view msg) {
  if (log_level() < at) return;
  std::fprintf(stderr, "[%s] %.*s\n", tag, static_cast<int>(msg.size()),
               msg.data());
}
}  // namespace

void log_error(std::string_view msg) { emit(LogLevel::Error, "error", msg); }
void log_warn(std::string_view msg) { emit(LogLevel::Warn, "warn", msg); }
void log_info(std::string_view msg) { emit(LogLevel::Info, "info", msg); }
void log_debug(std::string_view msg) { emit(LogLevel::Debug, "debug", msg); }

}  // namespace fogsim
