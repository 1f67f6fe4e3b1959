#pragma once

#include <stdexcept>
#include <string>

namespace kahler {

// Input outside the chart domain, degenerate planes, zero covectors where a
// direction is needed.
class RejectedInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A denominator in the coefficient formulas vanished.
class SingularParameterError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// G1 or G2 failed to be positive definite at a bundle point.
class InadmissiblePointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A finite-difference estimate is untrustworthy (the two Richardson levels
// disagree, or a matrix that should be well conditioned is not).
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration or CLI usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kahler
