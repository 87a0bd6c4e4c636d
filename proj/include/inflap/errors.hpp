#pragma once

#include <stdexcept>
#include <string>

namespace inflap {

/// Rejected argument or configuration value (range, parity, admissibility).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested a node or ball that is not fully inside the lattice interior.
struct OutOfDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Analytic evaluation requested on the singular set of a closed form.
struct SingularPointError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Too few usable samples for a fit or a dyadic measurement.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// NaN/Inf detected while iterating.
struct NumericalFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unwritable output path or failed write.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Config text rejected; carries the offending line and key.
struct ParseError : std::runtime_error {
    int line;
    std::string key;
    ParseError(int line_, std::string key_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + " [" + key_ + "]: " + what_),
          line(line_), key(std::move(key_)) {}
};

} // namespace inflap
