#pragma once

#include <stdexcept>
#include <string>

namespace shorteq {

/// Base class for every numerical failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverse transform leaks energy outside the requested tap window.
class AliasError : public Error {
public:
    using Error::Error;
};

/// Base for failures inside spectral factorization.
class FactorizationError : public Error {
public:
    using Error::Error;
};

/// A spectrum that must stay bounded away from zero does not.
class SpectralNull : public FactorizationError {
public:
    using FactorizationError::FactorizationError;
};

/// A factor (or inverse) carries too much energy past its length budget.
class TruncationError : public FactorizationError {
public:
    using FactorizationError::FactorizationError;
};

class InvalidBeta : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent user configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace shorteq
