#pragma once

#include <stdexcept>
#include <string>

namespace stabopt {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    InvalidParameter,
    InvalidInput,
    Format,
    InvalidState,
    RankDeficient,
    Infeasible,
    SolverFailure,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace stabopt
