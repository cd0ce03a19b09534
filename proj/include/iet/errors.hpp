#pragma once

#include <stdexcept>
#include <string>

namespace iet {

// Malformed input (JSON, numbers, flags).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition or domain violation: connection hit, reducible data, ...
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConnectionError : public DomainError {
public:
    using DomainError::DomainError;
};

// Mantissa exhausted during deep induction or an ill-conditioned solve.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal consistency failure (a bug, not bad input).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace iet
