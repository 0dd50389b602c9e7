#pragma once

#include <stdexcept>
#include <string>

namespace hlevy {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or dimension mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented invariant (non-Hermitian, non-PSD, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to converge.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Misparametrized Lévy measure or triplet.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A closed form is not available; the message names the integrand.
class NeedsQuadratureError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// A function was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Spectrum not simple where a derivative needs it.
class GapError : public PreconditionError {
 public:
  GapError(const std::string& what, int i, int j, double gap)
      : PreconditionError(what), i_(i), j_(j), gap_(gap) {}
  int first() const { return i_; }
  int second() const { return j_; }
  double gap() const { return gap_; }

 private:
  int i_;
  int j_;
  double gap_;
};

/// Finite-difference stencil would cross an eigenvalue collision.
class StencilError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Bad configuration file or key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlevy
