#pragma once

#include <stdexcept>
#include <string>

namespace twinlane {

/// Base for every error raised by the library. `category()` is the
/// machine-readable tag the CLI reports on failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "invalid_argument"; }
};

class SimulationError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "simulation"; }
};

class CourseError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "course"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

}  // namespace twinlane
