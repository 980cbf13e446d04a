#include "warpforge/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace warpforge {

namespace {

LogLevel parse_level(const char* text) {
    if (!text) return LogLevel::warn;
    const std::string s(text);
    if (s == "error") return LogLevel::error;
    if (s == "warn") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

std::atomic<LogLevel>& level_slot() {
    static std::atomic<LogLevel> level{parse_level(std::getenv("WARPFORGE_LOG"))};
    return level;
}

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

}  // namespace

LogLevel log_level() { return level_slot().load(std::memory_order_relaxed); }

void set_log_level(LogLevel level) { level_slot().store(level, std::memory_order_relaxed); }

void log_message(LogLevel level, const std::string& message) {
    if (level > log_level()) return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[" << level_tag(level) << "] " << message << "\n";
}

}  // namespace warpforge
