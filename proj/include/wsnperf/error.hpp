#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsnperf {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (registry file, CSV table).
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string field, const std::string& what)
        : Error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(std::move(field)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// A well-formed value that breaks a type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lookup of a protocol, figure or modulation that does not exist.
class UnknownNameError : public Error {
public:
    using Error::Error;
};

/// Two tables that cannot be compared cell by cell.
class ShapeError : public Error {
public:
    using Error::Error;
};

}  // namespace wsnperf
