#include "vineuq/log.hpp"

#include <iostream>
#include <mutex>

namespace vuq {

namespace {

std::mutex g_mutex;
LogLevel g_level = LogLevel::Warning;

void stderr_sink(LogLevel level, std::string_view message) {
    static constexpr const char* kNames[] = {"debug", "info", "warning", "error"};
    std::cerr << "vineuq " << kNames[static_cast<int>(level)] << ": " << message << '\n';
}

std::function<void(LogLevel, std::string_view)> g_sink = stderr_sink;

}  // namespace

void set_log_sink(std::function<void(LogLevel, std::string_view)> sink) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_sink = std::move(sink);
}

void set_log_level(LogLevel min_level) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_level = min_level;
}

void log(LogLevel level, std::string_view message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (level < g_level || !g_sink) return;
    g_sink(level, message);
}

}  // namespace vuq
