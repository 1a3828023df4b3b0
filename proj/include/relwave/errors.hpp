#pragma once

#include <stdexcept>
#include <string>

namespace relwave {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation invoked on an object in the wrong state (e.g. representation mismatch).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configured resource cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relwave
