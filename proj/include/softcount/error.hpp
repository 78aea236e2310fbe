#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softcount {

/// Parameter or argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite or otherwise unusable value.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (at step " + std::to_string(step) + ")"), step_(step) {}
    explicit NumericError(const std::string& what)
        : std::runtime_error(what), step_(npos) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Malformed input file; line numbers are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace softcount
