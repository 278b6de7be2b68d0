#pragma once

#include <stdexcept>
#include <string>

namespace qseal {

// Input violates a documented precondition (non-Hermitian operator, bad POVM,
// broken promise, out-of-range parameter).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested dense object exceeds the configured maximum dimension.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace qseal
