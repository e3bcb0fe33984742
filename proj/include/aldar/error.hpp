#pragma once

#include <stdexcept>
#include <string>

namespace aldar {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
    Usage,        // invalid arguments or preconditions
    Parse,        // malformed input files, I/O
    Numeric,      // singular matrices, integration failure, explosive paths
    Convergence,  // optimizer failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::Usage, what);
}

}  // namespace aldar
