#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpcipi {

// Problems with user-supplied inputs (files, sequences, configs). The CLI maps
// these to exit code 2; anything else escaping a command is exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class LinkageError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace dpcipi
