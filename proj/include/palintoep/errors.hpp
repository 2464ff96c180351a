#pragma once

#include <stdexcept>
#include <string>

namespace palintoep {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix dimension incompatible with the requested palindromicity.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed its configured cost guard.
class GuardError : public Error {
public:
    using Error::Error;
};

/// Configuration file or parameter is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed its accuracy contract.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace palintoep
