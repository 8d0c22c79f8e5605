#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recipfm {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions or orders, bad indices, malformed arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A function evaluated outside its domain (ln of a non-positive value,
/// division by a zero-valued jet, 2F1 outside the unit disc, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Expression text that does not parse. `offset` is the 0-based byte offset
/// at which the problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A hypothesis required by an operation does not hold (e.g. a generator
/// that is not a conserved density, or with the wrong gradings).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Sampling or quadrature could not produce an admissible result.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace recipfm
