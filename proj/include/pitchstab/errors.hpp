#pragma once

#include <stdexcept>
#include <string>

namespace pitchstab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: dimensions, ranges, malformed configs. CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// No finite answer: singular solve, diverging simulation, Riccati cap. CLI exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace pitchstab
