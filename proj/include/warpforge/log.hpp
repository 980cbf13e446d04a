#ifndef WARPFORGE_LOG_HPP
#define WARPFORGE_LOG_HPP

#include <sstream>
#include <string>

namespace warpforge {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Current verbosity, initialized once from the WARPFORGE_LOG environment
/// variable (error|warn|info|debug, default warn).
LogLevel log_level();

void set_log_level(LogLevel level);

void log_message(LogLevel level, const std::string& message);

namespace detail {
inline void log_append(std::ostringstream&) {}
template <class T, class... Rest>
void log_append(std::ostringstream& os, const T& v, const Rest&... rest) {
    os << v;
    log_append(os, rest...);
}
}  // namespace detail

template <class... Args>
void log_error(const Args&... args) {
    std::ostringstream os;
    detail::log_append(os, args...);
    log_message(LogLevel::error, os.str());
}

template <class... Args>
void log_warn(const Args&... args) {
    if (log_level() < LogLevel::warn) return;
    std::ostringstream os;
    detail::log_append(os, args...);
    log_message(LogLevel::warn, os.str());
}

template <class... Args>
void log_info(const Args&... args) {
    if (log_level() < LogLevel::info) return;
    std::ostringstream os;
    detail::log_append(os, args...);
    log_message(LogLevel::info, os.str());
}

template <class... Args>
void log_debug(const Args&... args) {
    if (log_level() < LogLevel::debug) return;
    std::ostringstream os;
    detail::log_append(os, args...);
    log_message(LogLevel::debug, os.str());
}

}  // namespace warpforge

#endif
