#pragma once

#include <stdexcept>
#include <string>

namespace fiscalforge {

// Root of every error the library throws. The CLI maps the subclasses onto
// process exit codes (see tools/commands.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// Two sequences that must agree in length do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input data is unreadable, malformed or otherwise unusable.
class DataError : public Error {
public:
    using Error::Error;
};

class DuplicatePeriodError : public DataError {
public:
    using DataError::DataError;
};

// A feature column has max == min and cannot be min-max scaled.
class DegenerateScaleError : public DataError {
public:
    using DataError::DataError;
};

// A quarter with rnd + sga == 0 has no defined allocation.
class DegenerateQuarterError : public DataError {
public:
    using DataError::DataError;
};

// Operation called in the wrong lifecycle state (e.g. step after done).
class SequenceError : public Error {
public:
    using Error::Error;
};

// Caller violated a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

// Non-finite value produced during computation.
class NumericError : public Error {
public:
    using Error::Error;
};

// Checkpoint or other persisted artifact is missing, corrupt or mismatched.
class ArtifactError : public Error {
public:
    using Error::Error;
};

}  // namespace fiscalforge
