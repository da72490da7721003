#pragma once

#include <stdexcept>
#include <string>

namespace prodense {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A search finished without finding the requested object.
class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured size, bit-length or node budget would be exceeded.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input; the message carries the offending field or line.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prodense
