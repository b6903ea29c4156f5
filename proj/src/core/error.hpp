#pragma once

#include <stdexcept>
#include <string>

namespace wbwt {

enum class ErrorKind {
    invalid_argument,
    io,
    parse,
    numeric,
    internal,
};

// Single exception type used throughout the core; the C API maps kind to a
// status code and the CLI maps it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace wbwt
