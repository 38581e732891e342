#pragma once

#include <stdexcept>
#include <string>

namespace lidar_anchor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable, or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its content violates the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate an operation's precondition (bounds, sizes, geometry).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Feature vectors or models do not agree on the feature schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace lidar_anchor
