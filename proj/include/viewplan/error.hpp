#pragma once

#include <stdexcept>
#include <string>

namespace viewplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed geometry (too few vertices, non-manifold mesh, point off a boundary).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A parameter set or scene violates one of the problem's well-posedness constraints.
/// `constraint()` names the violated condition in words (e.g. "target separation").
class ValidationError : public Error {
 public:
  ValidationError(std::string constraint, const std::string& what)
      : Error(what), constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// The requested planning pipeline cannot produce a solution for this instance.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace viewplan
