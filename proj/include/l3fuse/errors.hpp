#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l3f {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Raised before an allocation that cannot be satisfied; carries the size.
class AllocationError : public Error {
 public:
  AllocationError(const std::string& what, std::size_t bytes)
      : Error(what), bytes_(bytes) {}
  std::size_t bytes() const noexcept { return bytes_; }

 private:
  std::size_t bytes_;
};

// Malformed configuration input. `field()` names the offending key.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string field)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace l3f
