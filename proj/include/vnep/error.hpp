/**
 * @file error.hpp
 * @brief Exception hierarchy shared by all vnep modules.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace vnep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document (JSON, LP text, orientation file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally well-formed input that violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An algorithm detected a broken internal invariant (e.g. a decomposition
/// step found no admissible variable). Never swallowed.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A brute-force enumeration exceeded its configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace vnep
