#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ow {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lexer/parser failure. Offset is a byte position into the source string.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::string token)
        : Error(std::move(message)), offset_(offset), token_(std::move(token)) {}
    std::size_t offset() const { return offset_; }
    const std::string& token() const { return token_; }

private:
    std::size_t offset_;
    std::string token_;
};

// Non-finite result during evaluation (log of non-positive, division by
// zero, ...). Offset points at the offending subexpression.
class EvalDomainError : public Error {
public:
    EvalDomainError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Node kind outside the symbolic-differentiation domain (abs).
class UnsupportedNodeError : public Error {
public:
    UnsupportedNodeError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Violated operation precondition (point outside interval, bad grid, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Weight failed validation: negative samples, non-finite or non-positive mass.
class InvalidWeightError : public Error {
public:
    using Error::Error;
};

} // namespace ow
