#pragma once

#include <stdexcept>
#include <string>

namespace twc {

// Exit codes surfaced by the command line tool.
enum class ExitCode : int {
  kSuccess = 0,
  kConfig = 2,
  kCheckpoint = 3,
  kDivergence = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode code() const noexcept { return ExitCode::kConfig; }
};

// Invalid configuration, wiring, or argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wiring-file problem; carries the 1-based source line (0 if not line-specific).
class WiringError : public ConfigError {
 public:
  WiringError(int line, const std::string& what)
      : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kCheckpoint; }
};

// Non-finite or out-of-envelope membrane potential.
class DivergenceError : public Error {
 public:
  using Error::Error;
  ExitCode code() const noexcept override { return ExitCode::kDivergence; }
};

}  // namespace twc
