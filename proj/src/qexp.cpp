#include "azb/qexp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "azb/errors.hpp"

namespace azb {

namespace {

// Sum of factors k >= K is bounded by 4 |Im z| q^{2K} / (1 - q^2) once
// q^{2K} |z| <= 1/2 keeps every remaining denominator above 1/2.
int truncation_length(double modulus, double imag_abs, const QExpParams& p, double* tail) {
  const double q2 = p.q * p.q;
  double t = 1.0;  // q^{2K}
  int k = 0;
  for (; k < p.max_terms; ++k, t *= q2) {
    if (t * modulus <= 0.5 && 4.0 * imag_abs * t / (1.0 - q2) <= p.tol) break;
  }
  *tail = t * modulus <= 0.5 ? 4.0 * imag_abs * t / (1.0 - q2) : std::numeric_limits<double>::infinity();
  return k;
}

// Accumulates sum arg(1 + q^{2k} z) over k < terms. `factor(k)` returns
// q^{2k} z for the k-th factor.
template <class Factor>
FqEvaluation phase_product(int terms, double tail, Factor factor) {
  FqEvaluation out;
  out.terms = terms;
  out.tail_bound = tail;
  double phase = 0.0;
  for (int k = 0; k < terms; ++k) {
    const Complex w = 1.0 + factor(k);
    if (w == Complex(0.0, 0.0)) {
      out.value = {-1.0, 0.0};
      out.singular = true;
      return out;
    }
    if (std::abs(w) < 1e-6) out.ill_conditioned = true;
    phase += std::arg(w);
  }
  out.value = std::polar(1.0, std::remainder(-2.0 * phase, kTwoPi));
  return out;
}

}  // namespace

FqEvaluation fq_evaluate(const GammaPoint& g, const QExpParams& params) {
  if (g.is_zero()) return {};
  if (g.is_singular()) {
    FqEvaluation out;
    out.value = {-1.0, 0.0};
    out.singular = true;
    return out;
  }
  const Complex ph = g.phase();
  const double modulus = std::pow(params.q, g.k());
  double tail = 0.0;
  const int terms = truncation_length(modulus, std::abs(modulus * ph.imag()), params, &tail);
  // The exponent 2k + g.k() is an integer, so q^{2k}|g| is formed exactly.
  return phase_product(terms, tail, [&](int k) { return std::pow(params.q, 2 * k + g.k()) * ph; });
}

Complex fq(const GammaPoint& g, const QExpParams& params) { return fq_evaluate(g, params).value; }

FqEvaluation fq_evaluate_complex(Complex z, const QExpParams& params) {
  if (z == Complex(0.0, 0.0)) return {};
  double tail = 0.0;
  const int terms = truncation_length(std::abs(z), std::abs(z.imag()), params, &tail);
  const double q2 = params.q * params.q;
  return phase_product(terms, tail, [&](int k) { return std::pow(q2, k) * z; });
}

Complex fq_complex(Complex z, const QExpParams& params) { return fq_evaluate_complex(z, params).value; }

CalculusResult fq_on_operator(const NormalMatrix& t, const QExpParams& params, const SpectralOptions& opts) {
  return apply_fn(t, params.q, [&](const GammaPoint& g) { return fq(g, params); }, opts);
}

CalculusResult fq_on_operator_unsnapped(const NormalMatrix& t, const QExpParams& params,
                                        const SpectralOptions& opts) {
  return apply_fn_unsnapped(t, [&](Complex z) { return fq_complex(z, params); }, opts);
}

Inversion invert_fq_family(std::span<const FamilySample> data, std::span<const GammaPoint> candidates,
                           const QExpParams& params) {
  if (candidates.empty()) throw ParameterError("invert_fq_family: no candidates");
  for (const auto& s : data) {
    if (std::abs(std::abs(s.value) - 1.0) > 1e-6) {
      throw ParameterError("invert_fq_family: data values must be unimodular");
    }
  }
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double obj = 0.0;
    for (const auto& s : data) obj += std::norm(s.value - fq(candidates[c] * s.gamma, params));
    if (obj < best) {
      second = best;
      best = obj;
      best_index = c;
    } else if (obj < second) {
      second = obj;
    }
  }
  if (candidates.size() > 1 && second - best < 1e-9) {
    throw AmbiguityError("invert_fq_family: two candidates fit the data equally well");
  }
  return {candidates[best_index], best, second};
}

std::vector<GammaPoint> inversion_candidates(const GammaGrid& grid) {
  std::vector<GammaPoint> out;
  out.reserve(static_cast<std::size_t>(grid.size()) + 1);
  out.push_back(GammaPoint::zero());
  for (const auto& g : grid.points()) out.push_back(g);
  return out;
}

double separation_certificate(const GammaGrid& grid, const QExpParams& params) {
  const auto candidates = inversion_candidates(grid);
  const auto pts = grid.points();
  std::vector<Vector> families;
  families.reserve(candidates.size());
  for (const auto& b : candidates) {
    Vector f(static_cast<Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) f(static_cast<Index>(i)) = fq(b * pts[i], params);
    families.push_back(std::move(f));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < families.size(); ++a) {
    for (std::size_t b = a + 1; b < families.size(); ++b) {
      best = std::min(best, (families[a] - families[b]).squaredNorm());
    }
  }
  return best;
}

}  // namespace azb
