#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace secount {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instance is too large for an exact (exponential) routine.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A scripted choice sequence was exhausted or did not match the candidates.
class ScriptError : public Error {
 public:
  using Error::Error;
};

/// Invalid probability, nonpositive importance, or numeric overflow during an estimate.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace secount
