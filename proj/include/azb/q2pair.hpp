#pragma once

// Regular q^2-pairs (Y, X) in finite models: construction, the four-part
// verification (normality, spectra in Gamma-bar, ker X = {0}, and the
// relation chi(X, g) Y chi(X, g)* = g Y), and the exponential identity
// F_q(X + Y) = F_q(Y) F_q(X).
//
// The cyclic model satisfies the relation exactly except on the wrap
// subspace, where the modulus index of Y's eigenbasis jumps from M/2 - 1 to
// -M/2. All relation residuals are therefore measured on an interior window.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "azb/gamma.hpp"
#include "azb/opalg.hpp"
#include "azb/qexp.hpp"

namespace azb {

struct Q2Pair {
  NormalMatrix y;
  NormalMatrix x;
  double q = 0.5;
  // The phase generator of the model is e^{2 pi i / phase_order}.
  int phase_order = 2;
  int margin = 0;
  // Projector for the relation check: interior modulus indices of Y's
  // eigenbasis. Identity for exact pairs.
  Matrix weyl_window;
  // Doubly-interior projector (position and Fourier modulus indices).
  Matrix exp_window;

  Index dim() const { return x.dim(); }
  // Modulus and phase generators used for the relation check.
  std::vector<GammaPoint> generators() const;
};

// X = diag(gamma(k, j)), Y = F* X F on the grid. margin < 0 selects M/4.
Q2Pair schrodinger_pair(const GammaGrid& grid, int margin = -1);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Q2Report {
  std::vector<Check> checks;
  bool pass = false;

  const Check* find(const std::string& name) const;
};

Q2Report verify_q2(const Q2Pair& pair, double tol, const SpectralOptions& opts = {});

// || P (chi(X, g) Y chi(X, g)* - g^power Y) P ||_2. power = -1 measures the
// inverse relation satisfied by pairs with swapped roles.
double windowed_weyl_residual(const NormalMatrix& y, const NormalMatrix& x, const GammaPoint& g, double q,
                              const Matrix& window, int power = 1, const SpectralOptions& opts = {});

struct ExpIdentityReport {
  double residual = 0.0;          // || (F(X+Y) - F(Y) F(X)) P ||
  double residual_swapped = 0.0;  // || (F(X+Y) - F(X) F(Y)) P ||
  double sum_defect = 0.0;
  double gamma_distance = 0.0;
  bool degraded = false;
};

ExpIdentityReport exp_identity_residual(const Q2Pair& pair, const QExpParams& params,
                                        const SpectralOptions& opts = {});

struct BlockSpec {
  enum class Kind { trivial, schrodinger };
  Kind kind = Kind::trivial;
  GammaPoint gamma0;  // trivial blocks: (b, a) = (0, gamma0)
  int order = 0;      // schrodinger blocks: sub-grid order, dimension order^2

  static BlockSpec trivial(const GammaPoint& g) { return {Kind::trivial, g, 0}; }
  static BlockSpec schrodinger(int order) { return {Kind::schrodinger, GammaPoint::zero(), order}; }

  Index dim() const { return kind == Kind::trivial ? 1 : static_cast<Index>(order) * order; }
  std::string describe() const;
};

enum class Mixing { within_blocks, global };

// Direct sum of blocks, each a regular pair, conjugated by seeded Haar
// unitaries (per block, or one acting on the whole space). Schrodinger
// blocks copy a sub-grid whose order divides the grid order.
Q2Pair random_regular_pair(std::span<const BlockSpec> blocks, std::uint64_t seed, const GammaGrid& grid,
                           Mixing mixing = Mixing::within_blocks);

// Seeded block list with total dimension at most max_dim: order-2
// Schrodinger blocks and trivial blocks with random grid points.
std::vector<BlockSpec> random_block_specs(std::uint64_t seed, const GammaGrid& grid, Index max_dim);
// Same block kinds with total dimension exactly dim.
std::vector<BlockSpec> random_block_specs_exact(std::uint64_t seed, const GammaGrid& grid, Index dim);

}  // namespace azb
