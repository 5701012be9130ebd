#pragma once

// The quantum exponential function
//
//   F_q(z) = prod_{k >= 0} (1 + q^{2k} conj(z)) / (1 + q^{2k} z)
//
// on Gamma-bar, with F_q = -1 on the singular set {-1, -q^-2, -q^-4, ...}.
// Each factor is conj(w)/w = e^{-2 i arg w} with w = 1 + q^{2k} z, so the
// product is accumulated as a phase sum and is unimodular by construction.

#include <span>
#include <vector>

#include "azb/gamma.hpp"
#include "azb/opalg.hpp"

namespace azb {

struct QExpParams {
  double q = 0.5;
  double tol = 1e-13;
  int max_terms = 512;
};

struct FqEvaluation {
  Complex value{1.0, 0.0};
  int terms = 0;
  // Certified bound on the neglected tail of the product.
  double tail_bound = 0.0;
  bool singular = false;
  // Some factor had |1 + q^{2k} z| < 1e-6.
  bool ill_conditioned = false;
};

FqEvaluation fq_evaluate(const GammaPoint& g, const QExpParams& params);
Complex fq(const GammaPoint& g, const QExpParams& params);

// Same product at an arbitrary complex argument. Truncated closure sums have
// spectra off the lattice; this is the continuous extension used there.
FqEvaluation fq_evaluate_complex(Complex z, const QExpParams& params);
Complex fq_complex(Complex z, const QExpParams& params);

// F_q(T) on the snapped spectrum of T.
CalculusResult fq_on_operator(const NormalMatrix& t, const QExpParams& params, const SpectralOptions& opts = {});
// F_q(T) on the raw Schur diagonal of T.
CalculusResult fq_on_operator_unsnapped(const NormalMatrix& t, const QExpParams& params,
                                        const SpectralOptions& opts = {});

struct FamilySample {
  GammaPoint gamma;
  Complex value;
};

struct Inversion {
  GammaPoint beta;
  double residual = 0.0;
  // Objective value of the second-best candidate.
  double runner_up = 0.0;
};

// argmin over candidates b of sum |value - F_q(b gamma)|^2. Throws
// ParameterError if a value is not unimodular within 1e-6 and AmbiguityError
// if the two best objective values are within 1e-9.
Inversion invert_fq_family(std::span<const FamilySample> data, std::span<const GammaPoint> candidates,
                           const QExpParams& params);

// Grid points together with 0.
std::vector<GammaPoint> inversion_candidates(const GammaGrid& grid);

// min over distinct candidates b1 != b2 of sum_gamma |F_q(b1 gamma) - F_q(b2 gamma)|^2.
double separation_certificate(const GammaGrid& grid, const QExpParams& params);

}  // namespace azb
