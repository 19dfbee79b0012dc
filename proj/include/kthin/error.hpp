#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kthin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph / tree / rotation text. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DisconnectedGraph : public Error {
public:
    DisconnectedGraph() : Error("graph is disconnected (lambda = 0)") {}
};

class InvalidTree : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class IllegalSwap : public Error {
public:
    using Error::Error;
};

/// A cut crossing the tree has weight zero, so its ratio is unbounded.
class UnboundedCertificate : public Error {
public:
    explicit UnboundedCertificate(std::vector<int> endpoints)
        : Error("unbounded certificate: zero-weight cut"), endpoints_(std::move(endpoints)) {}

    const std::vector<int>& endpoints() const noexcept { return endpoints_; }

private:
    std::vector<int> endpoints_;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Cached tables belong to a different tree than the one supplied.
class VersionMismatch : public Error {
public:
    using Error::Error;
};

/// Internal tables disagree (e.g. a negative sigma entry).
class ConsistencyFault : public Error {
public:
    using Error::Error;
};

class EmbeddingError : public Error {
public:
    using Error::Error;
};

class GuardExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace kthin
