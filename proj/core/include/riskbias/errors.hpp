#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace riskbias {

// Invalid argument values (violated preconditions).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Request outside the mathematically attainable domain. Where the domain is an
// interval, its endpoints ride along for diagnostics.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what,
                         double lo = std::numeric_limits<double>::quiet_NaN(),
                         double hi = std::numeric_limits<double>::quiet_NaN())
        : std::domain_error(what), lo_(lo), hi_(hi) {}
    double admissible_lo() const { return lo_; }
    double admissible_hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

// Broken internal invariant (a bug, not a user error).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace riskbias
