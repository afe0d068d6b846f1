#pragma once

#include <stdexcept>
#include <string>

namespace igasens {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's mathematical domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Input data violates a structural invariant (counts, signs, layouts).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A geometry mapping is invalid (non-positive Jacobian determinant).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// A matrix or scalar that must be invertible is (numerically) singular.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// A matrix required to be positive definite is not.
class DefinitenessError : public Error {
public:
  using Error::Error;
};

/// An eigenvalue is too close to its neighbours for derivative computation.
class MultiplicityError : public Error {
public:
  using Error::Error;
};

/// A linear system turned out numerically rank deficient.
class NumericalRankError : public Error {
public:
  using Error::Error;
};

/// The requested combination of features is not supported.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// Mode tracking could not match a predicted mode to any candidate.
class NoMatchError : public Error {
public:
  using Error::Error;
};

}  // namespace igasens
