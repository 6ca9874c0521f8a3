#pragma once

#include <stdexcept>
#include <string>

namespace spinbath {

enum class ErrorCode {
  kValidation,
  kDimension,
  kDegenerate,
  kConfig,
  kCapacity,
  kIo,
};

/// Process exit status the command-line runner uses for each category.
constexpr int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kCapacity:
      return 3;
    case ErrorCode::kIo:
      return 4;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const char* kind, const std::string& what)
      : std::runtime_error(what), code_(code), kind_(kind) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return exit_code_for(code_); }
  /// Short machine-readable tag, e.g. "capacity_error".
  const char* kind() const noexcept { return kind_; }

 private:
  ErrorCode code_;
  const char* kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::kValidation, "validation_error", what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCode::kDimension, "dimension_error", what) {}
};

/// A distribution with zero width was passed where a density is required.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorCode::kDegenerate, "degenerate_error", what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorCode::kCapacity, "capacity_error", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, "config_error", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorCode::kIo, "io_error", what) {}
};

}  // namespace spinbath
