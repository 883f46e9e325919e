#pragma once

#include <stdexcept>
#include <string>

namespace swingsim {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rotor speed at or below the evaluation floor of a model that divides by it.
class SingularState : public Error {
 public:
  using Error::Error;
};

// Requested equilibrium does not exist for the given parameters.
class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

// State components do not match what the model or set expects.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// A parameter inequality required by an analysis result does not hold.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

}  // namespace swingsim
