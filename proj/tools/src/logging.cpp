#include "floquet_pt/logging.hpp"

#include <cstdlib>
#include <ostream>
#include <string>

namespace fpt::cli {

LogLevel level_from_env() {
  const char* raw = std::getenv("FLOQUET_PT_LOG");
  if (!raw) return LogLevel::Warn;
  const std::string v(raw);
  if (v == "off") return LogLevel::Off;
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void Logger::log(LogLevel level, std::string_view message) const {
  if (level == LogLevel::Off || static_cast<int>(level) > static_cast<int>(level_)) return;
  static constexpr const char* names[] = {"", "error", "warn", "info", "debug"};
  sink_ << "[floquet-pt " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace fpt::cli
