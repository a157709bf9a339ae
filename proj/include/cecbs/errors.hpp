#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cecbs {

// Base of every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A degenerate geometric configuration (e.g. an angle at a vertex that
// coincides with one of its neighbours).
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (curve parameter outside the
// knot range, time before departure).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Scenario or solution file that fails to parse or violates an invariant.
// `field()` names the offending location, e.g. "agents[1].start".
class InvalidScenario : public Error {
 public:
  InvalidScenario(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cecbs
