#pragma once

#include <stdexcept>
#include <string>

namespace agee {

enum class ErrorKind {
  InvalidGraph,
  InvalidNode,
  Format,
  Io,
  DegenerateInput,
  InsufficientSupport,
  Range,
  Sampling,
  TrainingDiverged,
  Fit,
  Alignment,
  Dimension,
  UndefinedMetric,
  Config,
};

/// Runtime error carrying a machine-checkable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace agee
