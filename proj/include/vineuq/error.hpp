#pragma once

#include <stdexcept>
#include <string>

namespace vuq {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative procedure failed, or a non-finite value appeared mid-computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration (files, JSON, CLI flags).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Singular structure or unsupported vine layout.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vuq
