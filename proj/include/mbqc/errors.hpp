#pragma once

#include <stdexcept>
#include <string>

namespace mbqc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad Pauli text, invalid stabilizer group,
// broken flow, out-of-range parameters. CLI exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// A size cap was exceeded (dense, enumeration, spectral, ...). CLI exit code 3.
struct CapExceeded : Error {
    using Error::Error;
};

// No focused flow exists for the requested order/output choice.
struct NoFlowError : ValidationError {
    using ValidationError::ValidationError;
};

// File system failures. CLI exit code 4.
struct IoError : Error {
    using Error::Error;
};

}  // namespace mbqc
