#pragma once

#include <stdexcept>
#include <string>

namespace shadowlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// An index window would exceed the configured width cap.
class WindowCapError : public Error {
public:
    explicit WindowCapError(const std::string& what) : Error(what) {}
};

/// Malformed or rejected input data (configs, serialized objects).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A computed coefficient left the representable range.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

} // namespace shadowlab
