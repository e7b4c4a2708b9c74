#pragma once

#include <stdexcept>
#include <string>

namespace beamtie {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

class InterpolationSingularity : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

class ElementInversion : public Error {
 public:
  using Error::Error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class DegenerateNormal : public Error {
 public:
  using Error::Error;
};

class ProjectionFailure : public Error {
 public:
  using Error::Error;
};

class SingularDirector : public Error {
 public:
  using Error::Error;
};

class ConstraintOutOfRange : public Error {
 public:
  using Error::Error;
};

class SetupError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace beamtie
