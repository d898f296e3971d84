#pragma once

#include <stdexcept>
#include <string>

namespace smartfog {

// Base for every error raised by the library. Subclasses map one-to-one
// onto the failure categories callers are expected to branch on.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Caller violated an operation precondition (arity mismatch, missing entry...).
class ContractError : public Error {
public:
    using Error::Error;
};

// Graph is not in the shape the operation needs (e.g. disconnected).
class TopologyError : public Error {
public:
    using Error::Error;
};

// A churn event was refused because applying it would break overlay invariants.
class ChurnRejected : public Error {
public:
    using Error::Error;
};

// Identifier collision.
class ConflictError : public Error {
public:
    using Error::Error;
};

// More items requested than available.
class CapacityError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, int iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace smartfog
