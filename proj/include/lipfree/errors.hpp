#pragma once

#include <stdexcept>
#include <string>

namespace lipfree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-square matrix, non-finite entry, empty mask,
/// mismatched point sets. Distinct from a metric-axiom failure, which is
/// reported rather than thrown.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A construction refused its input because a hypothesis does not hold.
/// The message names the violated hypothesis and a witness.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A construction could not produce an object meeting its constraints.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lipfree
