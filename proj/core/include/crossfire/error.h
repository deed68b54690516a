#ifndef CROSSFIRE_ERROR_H
#define CROSSFIRE_ERROR_H

#include <stdexcept>
#include <string>

namespace crossfire {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario/train/sweep configuration or CLI input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor or model shapes that do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Destination unreachable from the source node.
class RoutingError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset or model file. Messages carry the offending line.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Model file with a version this build cannot read.
class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Dataset and model disagree (e.g. number of monitored links).
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace crossfire

#endif  // CROSSFIRE_ERROR_H
