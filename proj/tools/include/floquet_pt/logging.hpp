#pragma once

#include <iosfwd>
#include <string_view>

namespace fpt::cli {

enum class LogLevel { Off, Error, Warn, Info, Debug };

/// Level from FLOQUET_PT_LOG (off, error, warn, info, debug); warn when unset.
LogLevel level_from_env();

class Logger {
 public:
  Logger(std::ostream& sink, LogLevel level) : sink_(sink), level_(level) {}
  void log(LogLevel level, std::string_view message) const;
  void info(std::string_view message) const { log(LogLevel::Info, message); }
  void debug(std::string_view message) const { log(LogLevel::Debug, message); }
  void warn(std::string_view message) const { log(LogLevel::Warn, message); }

 private:
  std::ostream& sink_;
  LogLevel level_;
};

}  // namespace fpt::cli
