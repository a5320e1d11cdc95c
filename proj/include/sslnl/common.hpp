#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sslnl {

// Error carries a short machine-parseable category token ("io", "config",
// "shape", ...) next to the human-readable message. The CLI prints
// "error <category>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(category + ": " + message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
    throw Error(category, message);
}

// const char* overload keeps passing checks allocation-free in hot paths
inline void check(bool cond, const char* category, const char* message) {
    if (!cond) fail(category, message);
}

inline void check(bool cond, const char* category, const std::string& message) {
    if (!cond) fail(category, message);
}

} // namespace sslnl
