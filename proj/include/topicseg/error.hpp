#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topicseg {

/// Malformed input record. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input is well-formed but violates a structural invariant (duplicate ids, dangling references).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside the accepted domain of a computation.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input that is valid in form but leaves a statistic undefined (zero variance, nothing to average).
class DegenerateInputError : public InputError {
public:
    using InputError::InputError;
};

} // namespace topicseg
