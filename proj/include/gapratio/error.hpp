#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gapratio {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Input data violates an invariant (unsorted levels, missing unit tag, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t line)
        : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numerical routine did not reach the requested accuracy; carries the best estimate.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate_(estimate), error_(error_estimate) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

// Iterative linear algebra failed (e.g. eigensolver did not converge).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scalar optimizer could not bracket a minimum; carries the (x, f(x)) trace.
class OptimizationError : public std::runtime_error {
public:
    OptimizationError(const std::string& what, std::vector<std::pair<double, double>> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}

    const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

private:
    std::vector<std::pair<double, double>> trace_;
};

}  // namespace gapratio
