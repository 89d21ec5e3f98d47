#pragma once

#include <stdexcept>
#include <string>

namespace sqfr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input structure: empty groups, too few groups, negative scores.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Bad options: unknown columns, unknown scenarios, invalid scenario specs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable content. The message carries a 1-based row number or a JSON path.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqfr
