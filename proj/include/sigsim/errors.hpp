#pragma once

#include <stdexcept>
#include <string>

namespace sigsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, invalid configuration, violated preconditions
/// on user-supplied data. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A simulation invariant was breached (collision, red-light crossing,
/// vehicle conservation). The CLI maps these to exit code 3.
class InvariantBreach : public Error {
public:
    using Error::Error;
};

class DegenerateFit : public InputError {
public:
    using InputError::InputError;
};

class FlowExceedsCapacity : public InputError {
public:
    using InputError::InputError;
};

class EmptyWindow : public InputError {
public:
    using InputError::InputError;
};

class ZeroCapacity : public InputError {
public:
    using InputError::InputError;
};

/// Both roads reported zero flow; callers keep the previous schedule.
class BothZero : public InputError {
public:
    using InputError::InputError;
};

class Overcapacity : public InputError {
public:
    using InputError::InputError;
};

class EmptyTrace : public InputError {
public:
    using InputError::InputError;
};

class NoPasses : public InputError {
public:
    using InputError::InputError;
};

class ScenarioMismatch : public InputError {
public:
    using InputError::InputError;
};

/// Parse failure; carries the 1-based line number when known (0 otherwise).
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : InputError(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CollisionError : public InvariantBreach {
public:
    using InvariantBreach::InvariantBreach;
};

} // namespace sigsim
