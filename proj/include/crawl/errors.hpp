#pragma once

#include <stdexcept>
#include <string>

namespace crawl {

/// Malformed input: bad expression text, invalid JSON, violated model invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The numerical machinery failed (bracket not found, non-monotone iterates, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// The model violates the dissipativity condition; the attractor is not certified.
class DissipativityError : public std::runtime_error {
public:
    explicit DissipativityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace crawl
