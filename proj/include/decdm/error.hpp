#pragma once

#include <stdexcept>
#include <string>

namespace decdm {

/// Process exit codes shared by the CLI and the error hierarchy below.
enum class ExitCode : int {
    ok = 0,
    config = 2,
    numeric = 3,
    protocol = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad arguments, unknown keys, precondition violations, unreadable paths.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

/// Singular covariance, divergent training, non-finite values.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ExitCode::numeric, what) {}
};

/// Corrupt or mismatched files, role violations in the two-party workflow.
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& what) : Error(ExitCode::protocol, what) {}
};

}  // namespace decdm
