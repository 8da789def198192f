#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace archconf {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors caused by malformed or inconsistent user input. The CLI maps these
// to exit code 2; anything else escaping the pipeline is an internal error.
class InputError : public Error {
 public:
  using Error::Error;
};

class MalformedJson : public InputError {
 public:
  using InputError::InputError;
};

class MissingField : public InputError {
 public:
  explicit MissingField(std::string path)
      : InputError("missing field: " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class InvalidField : public InputError {
 public:
  InvalidField(std::string path, const std::string& why)
      : InputError("invalid field " + path + ": " + why), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class UnknownEndpoint : public InputError {
 public:
  UnknownEndpoint(std::size_t flow_index, std::string name)
      : InputError("information_flows[" + std::to_string(flow_index) +
                   "] references undeclared node '" + name + "'"),
        flow_index_(flow_index),
        name_(std::move(name)) {}
  std::size_t flow_index() const noexcept { return flow_index_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t flow_index_;
  std::string name_;
};

class DuplicateService : public InputError {
 public:
  explicit DuplicateService(std::string name)
      : InputError("duplicate service after normalization: '" + name + "'"),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class EmptyAfterNormalization : public InputError {
 public:
  explicit EmptyAfterNormalization(const std::string& raw)
      : InputError("name '" + raw + "' is empty after normalization") {}
};

class MalformedLine : public InputError {
 public:
  MalformedLine(std::size_t line, const std::string& why)
      : InputError("line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedDot : public InputError {
 public:
  MalformedDot(std::size_t line, const std::string& why)
      : InputError("dot line " + std::to_string(line) + ": " + why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NondeterministicTransition : public InputError {
 public:
  NondeterministicTransition(unsigned state, const std::string& symbol)
      : InputError("state " + std::to_string(state) +
                   " has more than one transition on '" + symbol + "'") {}
};

class UnreachableState : public InputError {
 public:
  explicit UnreachableState(unsigned state)
      : InputError("state " + std::to_string(state) + " is unreachable from the initial state"),
        state_(state) {}
  unsigned state() const noexcept { return state_; }

 private:
  unsigned state_;
};

class MalformedSymbol : public InputError {
 public:
  MalformedSymbol(const std::string& machine, const std::string& symbol)
      : InputError("machine '" + machine + "': malformed symbol '" + symbol + "'") {}
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleSpec : public InputError {
 public:
  using InputError::InputError;
};

class TooFewTraces : public InputError {
 public:
  using InputError::InputError;
};

class EmptyTraceSet : public Error {
 public:
  EmptyTraceSet() : Error("trace set is empty") {}
};

class NoInvolvedTransitions : public Error {
 public:
  NoInvolvedTransitions(const std::string& a, const std::string& b)
      : Error("no transitions between '" + a + "' and '" + b + "'") {}
};

class AlphabetTooSmall : public Error {
 public:
  AlphabetTooSmall() : Error("mutation alphabet needs at least two symbols") {}
};

class CannotAvoidPositives : public Error {
 public:
  CannotAvoidPositives() : Error("every single-symbol mutant collides with a positive trace") {}
};

}  // namespace archconf
