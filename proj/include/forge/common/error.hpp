#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forge {

// Base of every error the library throws. Callers that only care about
// "something in forge failed" catch this; the subclasses below exist where a
// caller reacts differently (retry on transport, exit 3 on environment, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the offending raw payload or line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// A model answer that matches both or neither of the expected verdicts.
class VerdictError : public ParseError {
public:
    using ParseError::ParseError;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// The operation is mathematically undefined for the given input
// (e.g. similarity of two empty sequences).
class UndefinedInputError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Something outside the process is missing: an executable, a credential.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

// Network or provider transport failure; retryable.
class TransportError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> path);
    const std::vector<std::string>& path() const noexcept { return path_; }

private:
    std::vector<std::string> path_;
};

class DepthError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

// An optimizer stopped without meeting its convergence criterion, or the
// data make the optimum infinite (separation).
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A singular information matrix: some coefficient is not identifiable.
class RankError : public Error {
public:
    using Error::Error;
};

// Too many bootstrap resamples failed for the interval to be trusted.
class ReliabilityError : public Error {
public:
    ReliabilityError(const std::string& what, std::size_t failed, std::size_t total)
        : Error(what), failed_(failed), total_(total) {}
    std::size_t failed() const noexcept { return failed_; }
    std::size_t total() const noexcept { return total_; }

private:
    std::size_t failed_;
    std::size_t total_;
};

// A computation that needs a complete set of inputs got a partial one.
class IncompleteInputError : public Error {
public:
    using Error::Error;
};

}  // namespace forge
