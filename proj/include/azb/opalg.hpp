#pragma once

// Functional calculus for finite normal and near-normal matrices.
//
// A NormalMatrix is an immutable dense matrix with a lazily computed
// unitary triangularization T = V R V*. For normal T the diagonal of R is
// the spectrum and V an eigenbasis; for near-normal T (truncated models of
// unbounded operators) the strictly upper part of R is discarded when a
// function is applied, and the normality defect ||TT* - T*T||_2 is carried
// so callers can tell an honest result from a degraded one.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "azb/gamma.hpp"
#include "azb/types.hpp"

namespace azb {

struct SpectralOptions {
  double snap_tol = kSnapTolerance;
  // Defect threshold relative to ||T||_2; above it results are flagged.
  double defect_rel = 1e-6;
};

struct EigenSystem {
  Matrix vectors;
  Vector values;
  // Frobenius norm of the strictly upper triangular Schur factor.
  double schur_offdiag = 0.0;
};

// Complex Schur based eigensystem. Throws DomainError on non-finite input.
EigenSystem eig_normal(const Matrix& t);

// Largest singular value.
double op_norm(const Matrix& a);

// Power iteration on A*A with 64 fixed iterations from a seed-derived start.
double estimate_op_norm(const std::function<Vector(const Vector&)>& apply,
                        const std::function<Vector(const Vector&)>& apply_adjoint, Index dim,
                        std::uint64_t seed);

Matrix kron(const Matrix& a, const Matrix& b);

class NormalMatrix {
 public:
  explicit NormalMatrix(Matrix entries);
  // T = V diag(values) V* with V unitary; the eigensystem is exact.
  static NormalMatrix from_spectral(Matrix vectors, Vector values);
  static NormalMatrix diagonal(const Vector& values);
  static NormalMatrix zero(Index dim);

  Index dim() const;
  const Matrix& entries() const;
  double norm() const;
  double normality_defect() const;
  double defect_threshold(const SpectralOptions& opts = {}) const;
  bool degraded(const SpectralOptions& opts = {}) const;
  // Computed once per value (shared between copies).
  const EigenSystem& eigensystem() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// Eigenvalues snapped onto Gamma-bar. Values with |z| below
// snap_tol * max(1, ||T||) become 0. Throws SpectralDomainError otherwise
// when a value is off the lattice.
std::vector<GammaPoint> snapped_spectrum(const NormalMatrix& t, double q, const SpectralOptions& opts = {});

struct CalculusResult {
  Matrix value;
  double normality_defect = 0.0;
  bool degraded = false;
};

using LatticeFunction = std::function<Complex(const GammaPoint&)>;
using ComplexFunction = std::function<Complex(Complex)>;

// V f(Lambda) V* from a precomputed eigensystem.
Matrix spectral_apply(const EigenSystem& es, const Vector& fvalues);

// f(T) with f evaluated on the snapped spectrum.
CalculusResult apply_fn(const NormalMatrix& t, double q, const LatticeFunction& f,
                        const SpectralOptions& opts = {});
// f(T) with f evaluated on the raw Schur diagonal. Used where the spectrum
// is not expected to lie on the lattice (truncated closure sums).
CalculusResult apply_fn_unsnapped(const NormalMatrix& t, const ComplexFunction& f,
                                  const SpectralOptions& opts = {});

// chi(X, g) = sum_lambda chi(lambda, g) E_X(lambda). Throws
// KernelConditionError if X has an eigenvalue at 0.
Matrix chi_op(const NormalMatrix& x, const GammaPoint& g, double q, const SpectralOptions& opts = {});

// Mean relative distance of the spectrum to the nearest modulus in q^Z.
double gamma_distance(const NormalMatrix& t, double q);

struct ClosureSum {
  NormalMatrix sum;
  double normality_defect = 0.0;
  double gamma_distance = 0.0;
};

// Finite stand-in for the closure of X + Y: the plain sum plus diagnostics.
ClosureSum closure_sum(const NormalMatrix& x, const NormalMatrix& y, double q);

}  // namespace azb
