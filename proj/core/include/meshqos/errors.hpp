#pragma once

#include <stdexcept>
#include <string>

namespace meshqos {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network PDU content or wire bytes.
class CodecError : public Error {
 public:
  using Error::Error;
};

// Scenario text that fails to parse or validate. line() is 1-based and
// 0 when the problem is not tied to a single line (validation errors).
class ScenarioError : public Error {
 public:
  ScenarioError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Dataset files that do not match the documented CSV schema.
class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshqos
