// errors.hpp: exception types shared by all tpflux modules

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tpf {

// Raised when a map (or a matrix-valued coefficient block) cannot be inverted
// within the configured condition-number threshold.
class SingularMap : public std::runtime_error {
public:
    SingularMap(double condition_number, std::optional<double> time, const std::string& what_arg)
        : std::runtime_error(what_arg), cond_(condition_number), time_(time) {}

    double condition_number() const noexcept { return cond_; }
    std::optional<double> time() const noexcept { return time_; }

private:
    double cond_;
    std::optional<double> time_;
};

// A finite-difference stencil needs more grid points than the trajectory has.
class BoundaryStencil : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A scalar function was evaluated outside its domain on an operator spectrum.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inputs that violate a type invariant (non-Hermitian, wrong dimension, ...).
class InvalidOperator : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Energy matching for the coherent-state construction has no solution with beta > 0,
// or the root is outside the search bracket.
class NoMatchingBeta : public std::runtime_error {
public:
    NoMatchingBeta(double lo, double hi, const std::string& what_arg)
        : std::runtime_error(what_arg), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

// The thermal Fock-space truncation leaves too much weight in the tail.
class TruncationError : public std::runtime_error {
public:
    TruncationError(int required_n_max, const std::string& what_arg)
        : std::runtime_error(what_arg), required_(required_n_max) {}

    int required_n_max() const noexcept { return required_; }

private:
    int required_;
};

// Scenario configuration that fails to parse or validate. line is 0 when the
// problem is attached to a field rather than a position in the file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what_arg) : std::runtime_error(what_arg), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace tpf
