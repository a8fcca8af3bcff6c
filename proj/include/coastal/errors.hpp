#pragma once

#include <stdexcept>
#include <string>

namespace coastal {

/// Invalid input: non-positive scales, mismatched grids, malformed configs.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite values encountered in a numerical kernel.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A time integration stopped before reaching its end time.
///
/// `time` is the time of the last valid state the solver held.
class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace coastal
