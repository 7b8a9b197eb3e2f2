#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tout {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state id could not be resolved in a StateStore.
class MissingState : public Error {
 public:
  explicit MissingState(unsigned long long id);
  unsigned long long id() const noexcept { return id_; }

 private:
  unsigned long long id_;
};

/// The text-generation endpoint stayed unreachable after all retries.
class BackendUnavailable : public Error {
 public:
  BackendUnavailable(const std::string& what, int last_status);
  /// Last HTTP status seen, or -1 when the connection itself failed.
  int last_status() const noexcept { return last_status_; }

 private:
  int last_status_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Division by zero or overflow in exact arithmetic.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// A dataset file is malformed.
class LoadError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tout
