#pragma once

#include <stdexcept>
#include <string>

namespace nlact {

// Invalid caller-supplied value (out-of-range parameter, bad index set).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that fails a numerical validity check (non-Hermitian, not PSD,
// not a projector, incomplete Kraus set).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested dimension exceeds a configured cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Conditional state is not of the shape a criterion supports.
class UnsupportedCutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& cause)
      : std::runtime_error(path + ": " + cause), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nlact
