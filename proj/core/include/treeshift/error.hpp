#pragma once

#include <stdexcept>
#include <string>

namespace treeshift {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input (unknown vertex, bad parameter, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an operation does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace treeshift
