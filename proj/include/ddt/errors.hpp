#pragma once

#include <stdexcept>
#include <string>

namespace ddt {

// Raised on malformed input files; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line)
      : std::runtime_error(message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Raised when dominant-codeword selection produces no codewords at all,
// i.e. the threshold exceeds every per-topic frequency.
class DegenerateSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddt
