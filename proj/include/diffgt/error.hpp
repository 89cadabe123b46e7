#pragma once

#include <stdexcept>
#include <string>

namespace diffgt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StepError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class MissingHandleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a training loss becomes non-finite. `dump_path` points at the
/// last finite parameter snapshot when one was written.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::string dump_path)
      : Error(what), dump_path_(std::move(dump_path)) {}

  const std::string& dump_path() const { return dump_path_; }

 private:
  std::string dump_path_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffgt
