#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssgk {

// Exit-code aligned error categories. The CLI maps each one to a process
// exit status (usage = 1, data = 2, numerical = 3).
enum class ErrorKind { usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

[[nodiscard]] inline std::string_view kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::data: return "data";
        case ErrorKind::numerical: return "numerical";
    }
    return "unknown";
}

[[noreturn]] inline void fail_data(const std::string& msg) { throw Error(ErrorKind::data, msg); }
[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }
[[noreturn]] inline void fail_numerical(const std::string& msg) {
    throw Error(ErrorKind::numerical, msg);
}

// Warnings go to stderr unless silenced (tests silence them).
void warn(const std::string& msg);
void set_warnings_enabled(bool enabled);

}  // namespace ssgk
