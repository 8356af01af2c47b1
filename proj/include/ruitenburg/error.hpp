#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ruitenburg {

// Base of every error thrown by the library. Input and usage problems derive
// from InputError; budget exhaustion and contract violations are reported
// separately so that callers can tell "bad input" from "the theorem broke".
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t position, const std::string& what)
        : InputError("parse error at offset " + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// A formula mentions an atom the model does not interpret.
class AtomError : public InputError {
public:
    using InputError::InputError;
};

// Malformed poset, evaluation or model file.
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

// Fixpoint operations require x to occur only positively.
class NotPositiveError : public InputError {
public:
    using InputError::InputError;
};

// A configured cap (enumeration size, atom count) was exceeded before any work started.
class CapExceeded : public InputError {
public:
    using InputError::InputError;
};

// A step/time budget ran out. Never converted into a verdict.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

// Something happened that the periodicity theorem rules out (no repeat within the
// iteration budget, a period above 2, a failed fixpoint check). Signals a bug.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// Soft wall-clock deadline shared by long-running operations.
class Deadline {
public:
    using clock = std::chrono::steady_clock;

    Deadline() = default;
    explicit Deadline(std::chrono::milliseconds budget) : end_(clock::now() + budget) {}

    bool expired() const { return end_ && clock::now() >= *end_; }

    void check(const char* where) const {
        if (expired()) {
            throw ResourceLimit(std::string("deadline exceeded in ") + where);
        }
    }

private:
    std::optional<clock::time_point> end_;
};

}  // namespace ruitenburg
