#pragma once

#include <stdexcept>
#include <string>

namespace sdenet {

// Root of the library's exception hierarchy. Each subclass maps onto one
// CLI exit code (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside its mathematical domain (e.g. kernel shape not in (0,1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Factorization failure, singular resolvent, non-PSD matrix after jitter.
class NumericError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input files.
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdenet
