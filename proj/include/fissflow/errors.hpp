#pragma once

#include <stdexcept>
#include <string>

namespace fissflow {

// Exit codes used by the CLI; errors carry the matching code.
enum class ErrorCode : int {
    config = 2,
    numeric = 3,
    mesh = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCode::config, msg) {}
};

// Bad arguments to library operations (size mismatches, negative times, ...).
class InvalidInputError : public Error {
public:
    explicit InvalidInputError(const std::string& msg) : Error(ErrorCode::config, msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(ErrorCode::numeric, msg) {}
};

class MeshError : public Error {
public:
    explicit MeshError(const std::string& msg) : Error(ErrorCode::mesh, msg) {}
};

}  // namespace fissflow
