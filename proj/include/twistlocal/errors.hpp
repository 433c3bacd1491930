#pragma once

#include <stdexcept>
#include <string>

namespace twistlocal {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Input exceeds a configured computational bound.
class BoundError : public std::runtime_error {
public:
    explicit BoundError(const std::string& what) : std::runtime_error(what) {}
};

// A verdict routine was called for a prime outside its case.
class DispatchError : public std::logic_error {
public:
    explicit DispatchError(const std::string& what) : std::logic_error(what) {}
};

// Floating-point evaluation could not certify an exact result.
class PrecisionError : public std::runtime_error {
public:
    explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twistlocal
