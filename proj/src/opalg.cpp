#include "azb/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "azb/errors.hpp"
#include "azb/random.hpp"

namespace azb {

EigenSystem eig_normal(const Matrix& t) {
  if (t.rows() != t.cols()) throw DimensionError("eig_normal: matrix must be square");
  if (!t.allFinite()) throw DomainError("eig_normal: non-finite entries");
  EigenSystem es;
  if (t.rows() == 0) return es;
  Eigen::ComplexSchur<Matrix> schur(t);
  if (schur.info() != Eigen::Success) throw DomainError("eig_normal: Schur iteration did not converge");
  const Matrix& r = schur.matrixT();
  es.vectors = schur.matrixU();
  es.values = r.diagonal();
  es.schur_offdiag = r.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  return es;
}

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double estimate_op_norm(const std::function<Vector(const Vector&)>& apply,
                        const std::function<Vector(const Vector&)>& apply_adjoint, Index dim,
                        std::uint64_t seed) {
  SplitMix rng(seed);
  Vector v = random_unit_vector(rng, dim);
  double sigma = 0.0;
  for (int it = 0; it < 64; ++it) {
    Vector w = apply_adjoint(apply(v));
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    sigma = std::sqrt(n);
    v = w / n;
  }
  return sigma;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// ---------------------------------------------------------- NormalMatrix

struct NormalMatrix::State {
  Matrix entries;

  std::once_flag eig_once;
  EigenSystem eig;

  std::once_flag defect_once;
  double defect = 0.0;

  std::once_flag norm_once;
  double norm = 0.0;
};

NormalMatrix::NormalMatrix(Matrix entries) : state_(std::make_shared<State>()) {
  if (entries.rows() != entries.cols()) throw DimensionError("NormalMatrix: matrix must be square");
  state_->entries = std::move(entries);
}

NormalMatrix NormalMatrix::from_spectral(Matrix vectors, Vector values) {
  if (vectors.rows() != vectors.cols() || vectors.cols() != values.size()) {
    throw DimensionError("NormalMatrix::from_spectral: shape mismatch");
  }
  NormalMatrix t(vectors * values.asDiagonal() * vectors.adjoint());
  const double n = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  std::call_once(t.state_->norm_once, [&] { t.state_->norm = n; });
  std::call_once(t.state_->eig_once, [&] {
    t.state_->eig.vectors = std::move(vectors);
    t.state_->eig.values = std::move(values);
  });
  return t;
}

NormalMatrix NormalMatrix::diagonal(const Vector& values) {
  NormalMatrix t = from_spectral(Matrix::Identity(values.size(), values.size()), values);
  std::call_once(t.state_->defect_once, [] {});
  return t;
}

NormalMatrix NormalMatrix::zero(Index dim) { return diagonal(Vector::Zero(dim)); }

Index NormalMatrix::dim() const { return state_->entries.rows(); }
const Matrix& NormalMatrix::entries() const { return state_->entries; }

double NormalMatrix::norm() const {
  std::call_once(state_->norm_once, [this] { state_->norm = op_norm(state_->entries); });
  return state_->norm;
}

double NormalMatrix::normality_defect() const {
  std::call_once(state_->defect_once, [this] {
    const Matrix& t = state_->entries;
    state_->defect = op_norm(t * t.adjoint() - t.adjoint() * t);
  });
  return state_->defect;
}

double NormalMatrix::defect_threshold(const SpectralOptions& opts) const { return opts.defect_rel * norm(); }

bool NormalMatrix::degraded(const SpectralOptions& opts) const {
  return normality_defect() > defect_threshold(opts);
}

const EigenSystem& NormalMatrix::eigensystem() const {
  std::call_once(state_->eig_once, [this] { state_->eig = eig_normal(state_->entries); });
  return state_->eig;
}

// -------------------------------------------------- functional calculus

std::vector<GammaPoint> snapped_spectrum(const NormalMatrix& t, double q, const SpectralOptions& opts) {
  const Vector& values = t.eigensystem().values;
  const double zero_tol = opts.snap_tol * std::max(1.0, t.norm());
  std::vector<GammaPoint> out;
  out.reserve(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values(i)) <= zero_tol) {
      out.push_back(GammaPoint::zero());
    } else {
      out.push_back(GammaPoint::snap(values(i), q, opts.snap_tol));
    }
  }
  return out;
}

Matrix spectral_apply(const EigenSystem& es, const Vector& fvalues) {
  return es.vectors * fvalues.asDiagonal() * es.vectors.adjoint();
}

CalculusResult apply_fn(const NormalMatrix& t, double q, const LatticeFunction& f, const SpectralOptions& opts) {
  const auto spectrum = snapped_spectrum(t, q, opts);
  Vector fv(t.dim());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(spectrum[static_cast<std::size_t>(i)]);
  return {spectral_apply(t.eigensystem(), fv), t.normality_defect(), t.degraded(opts)};
}

CalculusResult apply_fn_unsnapped(const NormalMatrix& t, const ComplexFunction& f, const SpectralOptions& opts) {
  const EigenSystem& es = t.eigensystem();
  Vector fv(t.dim());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(es.values(i));
  return {spectral_apply(es, fv), t.normality_defect(), t.degraded(opts)};
}

Matrix chi_op(const NormalMatrix& x, const GammaPoint& g, double q, const SpectralOptions& opts) {
  if (g.is_zero()) throw DomainError("chi_op: gamma must be nonzero");
  const auto spectrum = snapped_spectrum(x, q, opts);
  Vector fv(x.dim());
  for (Index i = 0; i < fv.size(); ++i) {
    const GammaPoint& lambda = spectrum[static_cast<std::size_t>(i)];
    if (lambda.is_zero()) throw KernelConditionError("chi_op: operator has an eigenvalue at 0");
    fv(i) = chi(lambda, g);
  }
  return spectral_apply(x.eigensystem(), fv);
}

double gamma_distance(const NormalMatrix& t, double q) {
  const Vector& values = t.eigensystem().values;
  if (values.size() == 0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < values.size(); ++i) acc += relative_gamma_distance(values(i), q);
  return acc / static_cast<double>(values.size());
}

ClosureSum closure_sum(const NormalMatrix& x, const NormalMatrix& y, double q) {
  if (x.dim() != y.dim()) throw DimensionError("closure_sum: dimension mismatch");
  NormalMatrix sum(x.entries() + y.entries());
  const double defect = sum.normality_defect();
  const double dist = gamma_distance(sum, q);
  return {sum, defect, dist};
}

}  // namespace azb
