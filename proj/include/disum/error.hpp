#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace disum {

// Error categories map onto the CLI exit-code contract:
// Io -> exit 2, everything else -> exit 1.
enum class ErrorKind {
  Validation,  // bad input data, violated preconditions
  Config,      // bad configuration file or flag values
  Io,          // missing/unreadable/unwritable files
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  static Error validation(std::string message) {
    return Error(ErrorKind::Validation, std::move(message));
  }
  static Error config(std::string message) {
    return Error(ErrorKind::Config, std::move(message));
  }
  static Error io(std::string message) {
    return Error(ErrorKind::Io, std::move(message));
  }

 private:
  ErrorKind kind_;
};

}  // namespace disum
