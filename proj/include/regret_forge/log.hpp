#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace regret_forge {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from the REGRET_FORGE_LOG environment variable
// (error | info | debug), default error. Parsed once.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("REGRET_FORGE_LOG");
        if (env == nullptr) return LogLevel::error;
        std::string s(env);
        if (s == "debug") return LogLevel::debug;
        if (s == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

namespace detail {
inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

template <typename... Args>
void log_at(LogLevel level, const char* tag, const Args&... args) {
    if (level > log_level()) return;
    std::ostringstream oss;
    oss << "[" << tag << "] ";
    (oss << ... << args);
    std::lock_guard<std::mutex> lock(log_mutex());
    std::cerr << oss.str() << "\n";
}
}  // namespace detail

template <typename... Args>
void log_error(const Args&... args) {
    detail::log_at(LogLevel::error, "error", args...);
}

template <typename... Args>
void log_info(const Args&... args) {
    detail::log_at(LogLevel::info, "info", args...);
}

template <typename... Args>
void log_debug(const Args&... args) {
    detail::log_at(LogLevel::debug, "debug", args...);
}

}  // namespace regret_forge
