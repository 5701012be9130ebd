#pragma once

// The lattice group Gamma = { z : |z| in q^Z } ~ Z x S^1, its closure
// Gamma-bar = Gamma u {0}, the self-duality bicharacter chi, and the finite
// cyclic model Z_M x Z_M used for all operator computations.
//
// Phase convention. The classical parametrization writes a lattice point as
// q^{i phi + k}. Since q^{i phi} = e^{i phi ln q}, the stored angle is
// theta = phi * ln q (mod 2 pi). With 0 < q < 1 we have ln q < 0, so theta
// runs opposite to phi. Everything here works with theta = arg(gamma).

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "azb/types.hpp"

namespace azb {

inline constexpr double kSnapTolerance = 1e-9;
inline constexpr std::int64_t kMaxSnapDenominator = 256;

// Exact fraction of a full turn, kept reduced with 0 <= num < den.
class Turns {
 public:
  Turns() = default;
  Turns(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double radians() const;
  // e^{2 pi i num/den}; exact for multiples of a quarter turn.
  Complex unit() const;

  Turns operator+(const Turns& other) const;
  Turns operator-() const;
  Turns scaled(std::int64_t factor) const;

  friend bool operator==(const Turns&, const Turns&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Element of Gamma-bar stored as (k, theta) so that lattice membership and
// the singular set of F_q are decided without floating-point comparisons.
// Points built from grid indices additionally carry their phase as exact
// Turns; arithmetic between such points stays exact.
class GammaPoint {
 public:
  static GammaPoint zero();
  static GammaPoint make(int k, double theta);
  static GammaPoint from_turns(int k, Turns phase);
  // Nearest point of Gamma-bar to z. Throws SpectralDomainError when the
  // relative modulus distance exceeds rel_tol. |z| <= rel_tol snaps to 0.
  // The phase is rounded to a rational turn when one is within rel_tol.
  static GammaPoint snap(Complex z, double q, double rel_tol = kSnapTolerance);

  bool is_zero() const { return zero_; }
  int k() const { return k_; }
  double theta() const { return theta_; }
  const std::optional<Turns>& turns() const { return turns_; }

  // Membership in {-1, -q^-2, -q^-4, ...}: theta = pi, k <= 0, k even.
  bool is_singular() const;

  Complex phase() const;
  Complex value(double q) const;

  GammaPoint operator*(const GammaPoint& other) const;
  GammaPoint inverse() const;
  GammaPoint conj() const;

  friend bool operator==(const GammaPoint& a, const GammaPoint& b);

  std::string to_string() const;

 private:
  bool zero_ = false;
  int k_ = 0;
  double theta_ = 0.0;
  std::optional<Turns> turns_;
};

// chi(g1, g2) = e^{i (l theta1 + k theta2)}, with k, l the modulus exponents.
// Throws DomainError if either point is zero.
Complex chi(const GammaPoint& g1, const GammaPoint& g2);

// Relative distance of |z| to the nearest modulus in q^Z (0 for z = 0).
double relative_gamma_distance(Complex z, double q);

// Finite model Z_M x Z_M of Gamma. Index p = k * M + j labels the point
// gamma(k, j) = q^{c(k)} e^{2 pi i j/M}, with c(k) the centered
// representative of k in [-M/2, M/2).
class GammaGrid {
 public:
  GammaGrid(double q, int order);

  double q() const;
  int order() const;
  Index size() const;
  std::span<const std::string> warnings() const;

  int centered(int k) const;
  Index index(int k, int j) const;
  int modulus_index(Index p) const;
  int phase_index(Index p) const;
  // Index of the point reached by adding the offset t componentwise mod M.
  Index translate(Index p, Index t) const;
  Index negate(Index p) const;

  const GammaPoint& point(Index p) const;
  std::span<const GammaPoint> points() const;
  Complex value(Index p) const;
  Vector values() const;

  // chi_M(p, p') = e^{2 pi i (j l + j' k)/M}.
  Complex pairing(Index p, Index p2) const;

  // Generators of the grid as elements of Gamma: q and e^{2 pi i/M}.
  GammaPoint modulus_generator() const;
  GammaPoint phase_generator() const;

  // Unitary with kernel chi_M / M.
  const Matrix& fourier() const;
  // Matrix-free F v and F* v as a cross-coupled two-axis DFT.
  Vector fourier_apply(const Vector& v) const;
  Vector fourier_adjoint_apply(const Vector& v) const;

  // Diagonal 0/1 mask selecting modulus indices c(k) in [-M/2 + m, M/2 - m).
  Vector interior_mask(int margin) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

}  // namespace azb
