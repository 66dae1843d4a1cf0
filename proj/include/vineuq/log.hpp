#pragma once

#include <functional>
#include <string_view>

namespace vuq {

enum class LogLevel { Debug, Info, Warning, Error };

/// Replaces the log sink (default: stderr, warnings and above). Pass an
/// empty function to silence logging.
void set_log_sink(std::function<void(LogLevel, std::string_view)> sink);
void set_log_level(LogLevel min_level);

void log(LogLevel level, std::string_view message);
inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }

}  // namespace vuq
