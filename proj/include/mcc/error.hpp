#pragma once

#include <stdexcept>
#include <string>

namespace mcc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, malformed data, non-finite values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// A mathematical precondition of an operation does not hold (warm start, monotone map, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The finite-difference oracle could not produce a converged value.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void fail_invalid(const std::string& what);
void require_finite(double v, const char* what);

}  // namespace mcc
