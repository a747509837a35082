#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtc {

/// Base class of every error raised by the codec.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, sizes or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed bitstream. Carries the byte offset of the first violation.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Integration divergence, solver failure, non-monotone tables.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtc
