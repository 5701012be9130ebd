#pragma once

// Unitary representations U = F_q(b~ (x) b) chi(a~ (x) I, I (x) a) of the
// quantum "az+b" group on H (x) H_grid, where (b, a) is the Schrodinger pair
// of the grid and (b~, a~) a regular pair on H.
//
// Tensor index convention: H is the major index, so a vector on
// H (x) H_grid (x) H_grid is laid out as ((i * n) + p) * n + p'.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "azb/gamma.hpp"
#include "azb/opalg.hpp"
#include "azb/q2pair.hpp"
#include "azb/qexp.hpp"

namespace azb {

struct PairOnH {
  Q2Pair pair;  // y = b~, x = a~
  std::string provenance;

  const NormalMatrix& b_t() const { return pair.y; }
  const NormalMatrix& a_t() const { return pair.x; }
  Index dim() const { return pair.dim(); }
};

struct Representation {
  Matrix u;
  GammaGrid grid;
  Index h_dim = 0;
  // The generating pair when U was built here (absent after loading).
  std::optional<PairOnH> source;

  double unitarity_defect() const;
};

struct Coproduct {
  NormalMatrix delta_a;  // a (x) a
  NormalMatrix delta_b;  // a (x) b + b (x) I
};

// Dense coproduct of the grid generators. Throws SizeGuardError for M > 8.
Coproduct coproduct(const GammaGrid& grid);

// Unitary triangularization of Delta b. Conjugating the second leg by F
// gives a (x) a + b (x) I, which for each second-leg index r acts on the
// first leg as x_r a + b; the Schur form is assembled from these blocks.
struct DeltaBSchur {
  std::vector<Matrix> vectors;  // Schur vectors of x_r a + b, one per r
  Matrix values;                // values(m, r): m-th diagonal entry of block r
  double schur_offdiag = 0.0;   // Frobenius norm over all blocks
  double max_abs_value = 0.0;

  // V* w and V w for w on H_grid (x) H_grid, V = (I (x) F*) diag(vectors).
  // Coordinates after `to_schur` are (m, r) in the layout m * n + r.
  void to_schur(const GammaGrid& grid, Complex* w) const;
  void from_schur(const GammaGrid& grid, Complex* w) const;
};

DeltaBSchur delta_b_schur(const GammaGrid& grid);

struct Coassociativity {
  double on_a = 0.0;
  double on_b = 0.0;
};

// (Delta (x) id) Delta x - (id (x) Delta) Delta x for x = a, b, estimated
// matrix-free by power iteration on H_grid^(x3).
Coassociativity coassociativity_residuals(const GammaGrid& grid, std::uint64_t seed);

Representation build_rep(const PairOnH& pair, const GammaGrid& grid, const QExpParams& params,
                         const SpectralOptions& opts = {});

struct CorepResidual {
  double residual = 0.0;
  bool degraded = false;
  double delta_b_schur_offdiag = 0.0;
};

// max over seeded unit vectors v of || ((id (x) Delta) U - U12 U13) v ||.
CorepResidual corep_residual(const Representation& rep, int samples, std::uint64_t seed, const QExpParams& params,
                             const SpectralOptions& opts = {});

// Operator norm of the same defect, by power iteration.
CorepResidual corep_residual_norm(const Representation& rep, std::uint64_t seed, const QExpParams& params,
                                  const SpectralOptions& opts = {});

struct Extraction {
  PairOnH pair;
  double completeness = 0.0;        // || sum_delta E(delta) - I ||
  double family_unitarity = 0.0;    // max_s || G(s) G(s)* - I ||
  double family_commutator = 0.0;   // max_{s,t} || [G(s), G(t)] ||
  double inversion_residual = 0.0;  // worst per-vector inversion objective
  std::vector<std::string> flags;
  Q2Report verification;
};

// Recover (b~, a~) from U. Throws ExtractionError when the spectra are not
// supported on the grid.
Extraction extract_pair(const Representation& rep, const QExpParams& params, std::uint64_t seed = 1,
                        const SpectralOptions& opts = {});

// max over the pair's generators of || P (chi(a~, g) b~ chi(a~, g)* - g b~) P ||.
double weyl_residual(const PairOnH& pair, const SpectralOptions& opts = {});

}  // namespace azb
