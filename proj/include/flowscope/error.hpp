#pragma once

#include <stdexcept>
#include <string>

namespace flowscope {

enum class ErrorKind {
  kInvalidArgument,  // caller passed a value outside an operation's domain
  kData,             // unreadable or structurally broken input
  kPrecondition,     // well-formed request the data cannot satisfy
  kNotFound,         // unknown entity or interval
};

// All library failures are reported with this exception. `reason` is a short
// machine-readable token (e.g. "insufficient_history") for service responses.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string reason, const std::string& message)
      : std::runtime_error(message), kind_(kind), reason_(std::move(reason)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  ErrorKind kind_;
  std::string reason_;
};

}  // namespace flowscope
