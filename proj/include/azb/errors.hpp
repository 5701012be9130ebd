#pragma once

#include <stdexcept>
#include <string>

namespace azb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (e.g. chi at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid construction parameter (q outside (0,1), odd grid order, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Spectrum of an operator lies off the closed lattice beyond snap tolerance.
class SpectralDomainError : public Error {
 public:
  using Error::Error;
};

// An operator required to have trivial kernel has an eigenvalue at 0.
class KernelConditionError : public Error {
 public:
  using Error::Error;
};

class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace azb
