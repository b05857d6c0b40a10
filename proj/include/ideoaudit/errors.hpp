#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ideoaudit {

/// Base of every error thrown by the toolkit. The CLI maps subclasses onto
/// stable exit codes (see app/cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// gateway
class GatewayError : public Error {
 public:
  using Error::Error;
};

/// Replay mode found no cache entry; the fixture set is incomplete.
class ReplayMiss : public GatewayError {
 public:
  explicit ReplayMiss(std::string key)
      : GatewayError("replay miss: no cache entry for " + key), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ScriptNoMatch : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

// parsing / generation
class ParseFailure : public Error {
 public:
  using Error::Error;
};

/// Raised when every retry of a required parse failed (root classification).
class ParseExhausted : public Error {
 public:
  using Error::Error;
};

class EmptyLabel : public Error {
 public:
  EmptyLabel() : Error("label is empty after normalization") {}
};

class EmptySide : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// statistics
class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
};

class SingleValue : public Error {
 public:
  SingleValue() : Error("box summary needs at least two values") {}
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class TooFewPairs : public Error {
 public:
  using Error::Error;
};

class ArtifactExists : public Error {
 public:
  using Error::Error;
};

}  // namespace ideoaudit
