#pragma once

#include <stdexcept>
#include <string>

namespace gapkit {

enum class ErrorKind {
    invalid_argument,  // malformed input or domain error of a function
    precondition,      // documented precondition of an operation violated
    convergence,       // iterative method hit its cap
    numerical,         // instability or vacuous bound detected at run time
    io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace gapkit
