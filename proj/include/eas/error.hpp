#pragma once

#include <stdexcept>
#include <string>

namespace eas {

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError -> 2, DataError and children -> 3, anything else -> 4.

// Invalid dimensions, rates, grids or other configuration values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems with user-supplied data (files, shapes, values).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension mismatch between containers that must agree.
struct ShapeError : DataError {
    using DataError::DataError;
};

// Non-finite or otherwise unusable input values.
struct InputError : DataError {
    using DataError::DataError;
};

// Calibration set too small or empty.
struct CalibrationError : DataError {
    using DataError::DataError;
};

// Malformed CSV input (missing header, bad cell, ragged row).
struct IngestionError : DataError {
    using DataError::DataError;
};

// Model file problems: unreadable, bad version, bad checksum, truncated.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A prediction was requested for an input whose code has no active units
// (and no fallback was requested).
struct NoActiveUnits : std::runtime_error {
    NoActiveUnits() : std::runtime_error("prediction has no active units") {}
};

}  // namespace eas
