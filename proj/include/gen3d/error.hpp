#pragma once

#include <stdexcept>
#include <string>

namespace gen3d {

/// Bad user input: malformed files, violated preconditions, invalid configuration.
/// The CLI maps this family to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ObjParseError : public InputError {
public:
    ObjParseError(std::size_t line, const std::string& what)
        : InputError("OBJ line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Marching cubes found no sign change at the requested iso level.
class EmptySurfaceError : public InputError {
public:
    using InputError::InputError;
};

class PackingOverflowError : public InputError {
public:
    using InputError::InputError;
};

/// A view generator backend failed (transport, protocol or content error).
class BackendError : public std::runtime_error {
public:
    BackendError(const std::string& what, int attempts = 1)
        : std::runtime_error(what), attempts_(attempts) {}

    int attempts() const { return attempts_; }

private:
    int attempts_;
};

/// Wraps a module failure with the pipeline stage it happened in.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what, bool input_error)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), input_error_(input_error) {}

    const std::string& stage() const { return stage_; }
    bool is_input_error() const { return input_error_; }

private:
    std::string stage_;
    bool input_error_;
};

}  // namespace gen3d
