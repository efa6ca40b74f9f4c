#pragma once

#include <stdexcept>
#include <string>

namespace lce {

/// Input does not satisfy a documented contract (bad file, bad argument,
/// inconsistent data). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input was well-formed but the computation cannot proceed (zero variance,
/// too few points, ...). Maps to CLI exit code 3.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lce
