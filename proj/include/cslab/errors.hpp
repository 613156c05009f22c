#pragma once

#include <stdexcept>
#include <string>

namespace cslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A root finder was given an interval without a sign change.
class NoBracket : public Error {
public:
    using Error::Error;
};

/// A function evaluated to NaN or infinity where a finite value was needed.
class NonFinite : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

/// The requested quantity does not exist for these parameters
/// (e.g. no successful branch below the critical rate).
class NoSolution : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace cslab
