#pragma once

#include <stdexcept>
#include <string>

namespace fairport {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed files, out-of-range arguments, unknown groups.
// The CLI maps this to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// A group label the calibrator was not fitted on.
class UnknownGroupError : public InputError {
public:
    using InputError::InputError;
};

// An internal consistency check failed. The CLI maps this to exit code 3.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace fairport
