#pragma once

#include <stdexcept>
#include <string>

namespace realmono {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or structurally invalid arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parse failure carrying the offending line number (1-based).
class ParseError : public InvalidInput {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : InvalidInput(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class CycleError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnknownElement : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class DomainMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotATree : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotALeaf : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotAChain : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class GridMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A coupling handed to the synchronizer does not reproduce the system.
class InfeasibleInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotErgodic : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// An enumeration or search exceeded its configured cap.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public SizeLimit {
 public:
  using SizeLimit::SizeLimit;
};

}  // namespace realmono
