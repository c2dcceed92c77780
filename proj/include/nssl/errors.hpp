/// @file errors.hpp
/// @brief Exception types for domain, parameter, and file-format failures.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nssl {

/// Input geometry or data outside an operation's domain (empty region,
/// query time outside the sampled interval, ball fully outside the box).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter outside its documented range (exponent, regime, scale ordering).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Malformed field file. Carries the byte offset of the first offending byte.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " +
                           std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace nssl
