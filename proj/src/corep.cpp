#include "azb/corep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "azb/errors.hpp"
#include "azb/random.hpp"

namespace azb {

namespace {

// v is viewed as (outer, leg, inner) in row-major order; applies `a` on the
// middle axis.
void apply_on_axis(const Matrix& a, Vector& v, Index outer, Index leg, Index inner) {
  for (Index o = 0; o < outer; ++o) {
    Eigen::Map<Matrix> slice(v.data() + o * leg * inner, inner, leg);
    slice = (slice * a.transpose()).eval();
  }
}

// (d, n, n) -> (d, n, n) with the two grid legs exchanged.
Vector swap_grid_legs(const Vector& v, Index d, Index n) {
  Vector out(v.size());
  for (Index i = 0; i < d; ++i) {
    for (Index p = 0; p < n; ++p) {
      for (Index r = 0; r < n; ++r) out((i * n + r) * n + p) = v((i * n + p) * n + r);
    }
  }
  return out;
}

std::vector<GammaPoint> checked_nonzero(std::vector<GammaPoint> spectrum, const char* what) {
  for (const auto& g : spectrum) {
    if (g.is_zero()) throw KernelConditionError(std::string(what) + ": a~ has an eigenvalue at 0");
  }
  return spectrum;
}

}  // namespace

double Representation::unitarity_defect() const {
  return op_norm(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

Coproduct coproduct(const GammaGrid& grid) {
  if (grid.order() > 8) throw SizeGuardError("coproduct: dense mode supports M <= 8");
  const Index n = grid.size();
  Vector prod(n * n);
  for (Index p = 0; p < n; ++p) {
    for (Index r = 0; r < n; ++r) prod(p * n + r) = (grid.point(p) * grid.point(r)).value(grid.q());
  }
  const Q2Pair ba = schrodinger_pair(grid);
  const Matrix& a = ba.x.entries();
  const Matrix& b = ba.y.entries();
  return {NormalMatrix::diagonal(prod), NormalMatrix(kron(a, b) + kron(b, Matrix::Identity(n, n)))};
}

DeltaBSchur delta_b_schur(const GammaGrid& grid) {
  const Index n = grid.size();
  const Vector x = grid.values();
  const Matrix b = schrodinger_pair(grid).y.entries();
  DeltaBSchur out;
  out.values.resize(n, n);
  double off2 = 0.0;
  for (Index r = 0; r < n; ++r) {
    const EigenSystem es = eig_normal(Matrix(x(r) * x.asDiagonal()) + b);
    out.vectors.push_back(es.vectors);
    out.values.col(r) = es.values;
    off2 += es.schur_offdiag * es.schur_offdiag;
  }
  out.schur_offdiag = std::sqrt(off2);
  out.max_abs_value = out.values.cwiseAbs().maxCoeff();
  return out;
}

// Column-major view (r, p) of w[p * n + r]: row r is the first-leg vector
// at second-leg index r.
void DeltaBSchur::to_schur(const GammaGrid& grid, Complex* w) const {
  const Index n = grid.size();
  Eigen::Map<Matrix> view(w, n, n);
  view = (grid.fourier() * view).eval();
  for (Index r = 0; r < n; ++r) view.row(r) = (vectors[r].adjoint() * view.row(r).transpose()).transpose();
}

void DeltaBSchur::from_schur(const GammaGrid& grid, Complex* w) const {
  const Index n = grid.size();
  Eigen::Map<Matrix> view(w, n, n);
  for (Index r = 0; r < n; ++r) view.row(r) = (vectors[r] * view.row(r).transpose()).transpose();
  view = (grid.fourier().adjoint() * view).eval();
}

Coassociativity coassociativity_residuals(const GammaGrid& grid, std::uint64_t seed) {
  const Index n = grid.size();
  const auto pts = grid.points();
  Coassociativity out;

  // On a both sides are a (x) a (x) a; the lattice group law is exact.
  for (Index p = 0; p < n; ++p) {
    for (Index r = 0; r < n; ++r) {
      for (Index s = 0; s < n; ++s) {
        const Complex lhs = ((pts[p] * pts[r]) * pts[s]).value(grid.q());
        const Complex rhs = (pts[p] * (pts[r] * pts[s])).value(grid.q());
        out.on_a = std::max(out.on_a, std::abs(lhs - rhs));
      }
    }
  }

  const Coproduct cp = coproduct(grid);
  const Q2Pair ba = schrodinger_pair(grid);
  const Matrix a = ba.x.entries();
  const Matrix b = ba.y.entries();
  const Matrix& db = cp.delta_b.entries();
  const Vector& da = cp.delta_a.eigensystem().values;

  // D = (Delta a (x) b + Delta b (x) I) - (a (x) Delta b + b (x) I (x) I)
  auto apply = [&](const Vector& v, bool adjoint) {
    auto adj = [&](const Matrix& m) -> Matrix { return adjoint ? Matrix(m.adjoint()) : m; };
    Vector lhs1 = v;  // Delta a (x) b
    apply_on_axis(adj(b), lhs1, n * n, n, 1);
    for (Index i = 0; i < n * n; ++i) {
      lhs1.segment(i * n, n) *= adjoint ? std::conj(da(i)) : da(i);
    }
    Vector lhs2 = v;  // Delta b (x) I
    apply_on_axis(adj(db), lhs2, 1, n * n, n);
    Vector rhs1 = v;  // a (x) Delta b
    apply_on_axis(adj(db), rhs1, n, n * n, 1);
    apply_on_axis(adj(a), rhs1, 1, n, n * n);
    Vector rhs2 = v;  // b (x) I (x) I
    apply_on_axis(adj(b), rhs2, 1, n, n * n);
    return Vector(lhs1 + lhs2 - rhs1 - rhs2);
  };
  out.on_b = estimate_op_norm([&](const Vector& v) { return apply(v, false); },
                              [&](const Vector& v) { return apply(v, true); }, n * n * n, seed);
  return out;
}

Representation build_rep(const PairOnH& pair, const GammaGrid& grid, const QExpParams& params,
                         const SpectralOptions& opts) {
  if (pair.pair.q != grid.q() || params.q != grid.q()) throw ParameterError("build_rep: q mismatch");
  const Index d = pair.dim();
  const Index n = grid.size();
  const auto beta = snapped_spectrum(pair.b_t(), grid.q(), opts);
  const auto alpha = checked_nonzero(snapped_spectrum(pair.a_t(), grid.q(), opts), "build_rep");

  // F_q(b~ (x) b) is diagonal in (eigenbasis of b~) (x) (eigenbasis F* of b).
  const Matrix wb = kron(pair.b_t().eigensystem().vectors, grid.fourier().adjoint());
  Vector fv(d * n);
  for (Index i = 0; i < d; ++i) {
    for (Index s = 0; s < n; ++s) fv(i * n + s) = fq(beta[static_cast<std::size_t>(i)] * grid.point(s), params);
  }
  // chi(a~ (x) I, I (x) a) is diagonal in (eigenbasis of a~) (x) (position).
  const Matrix wa = kron(pair.a_t().eigensystem().vectors, Matrix::Identity(n, n));
  Vector cv(d * n);
  for (Index i = 0; i < d; ++i) {
    for (Index p = 0; p < n; ++p) cv(i * n + p) = chi(alpha[static_cast<std::size_t>(i)], grid.point(p));
  }

  Representation rep{(wb * fv.asDiagonal() * wb.adjoint()) * (wa * cv.asDiagonal() * wa.adjoint()), grid, d,
                     pair};
  return rep;
}

namespace {

// D = (id (x) Delta)U - U12 U13 on H (x) H_grid (x) H_grid, applied
// matrix-free.
class CorepDefect {
 public:
  CorepDefect(const Representation& rep, const QExpParams& params, const SpectralOptions& opts)
      : rep_(rep), d_(rep.h_dim), n_(rep.grid.size()) {
    const GammaGrid& grid = rep.grid;
    const PairOnH pair = rep.source ? *rep.source : extract_pair(rep, params, 1, opts).pair;
    const auto pts = grid.points();
    const auto beta = snapped_spectrum(pair.b_t(), grid.q(), opts);
    const auto alpha = checked_nonzero(snapped_spectrum(pair.a_t(), grid.q(), opts), "corep_residual");
    vb_ = pair.b_t().eigensystem().vectors;
    va_ = pair.a_t().eigensystem().vectors;
    b_zero_ = std::all_of(beta.begin(), beta.end(), [](const GammaPoint& g) { return g.is_zero(); });

    // F_q(b~ (x) Delta b) is diagonal in (eigenbasis of b~) (x) (Schur basis
    // of Delta b); its eigenvalues beta_i * lambda_m are off the lattice.
    if (!b_zero_) {
      schur_ = delta_b_schur(grid);
      degraded_ = schur_.schur_offdiag > opts.defect_rel * schur_.max_abs_value;
      fq_values_.resize(d_, n_ * n_);
      for (Index i = 0; i < d_; ++i) {
        const Complex bv = beta[static_cast<std::size_t>(i)].value(grid.q());
        for (Index m = 0; m < n_; ++m) {
          for (Index r = 0; r < n_; ++r) fq_values_(i, m * n_ + r) = fq_complex(bv * schur_.values(m, r), params);
        }
      }
    }

    // chi(a~ (x) I (x) I, I (x) Delta a) with Delta a = a (x) a diagonal.
    chi_values_.resize(d_, n_ * n_);
    for (Index i = 0; i < d_; ++i) {
      for (Index p = 0; p < n_; ++p) {
        for (Index r = 0; r < n_; ++r) {
          chi_values_(i, p * n_ + r) = chi(alpha[static_cast<std::size_t>(i)], pts[p] * pts[r]);
        }
      }
    }
  }

  Index dim() const { return d_ * n_ * n_; }
  bool degraded() const { return degraded_; }
  double schur_offdiag() const { return schur_.schur_offdiag; }

  Vector apply(const Vector& v, bool adjoint) const {
    const Index nn = n_ * n_;
    auto chi_step = [&](Vector& w, bool conj) {
      apply_on_axis(va_.adjoint(), w, 1, d_, nn);
      for (Index i = 0; i < d_; ++i) {
        auto seg = w.segment(i * nn, nn).array();
        if (conj) {
          seg *= chi_values_.row(i).transpose().array().conjugate();
        } else {
          seg *= chi_values_.row(i).transpose().array();
        }
      }
      apply_on_axis(va_, w, 1, d_, nn);
    };
    auto fq_step = [&](Vector& w, bool conj) {
      if (b_zero_) return;
      apply_on_axis(vb_.adjoint(), w, 1, d_, nn);
      for (Index i = 0; i < d_; ++i) schur_.to_schur(rep_.grid, w.data() + i * nn);
      for (Index i = 0; i < d_; ++i) {
        auto seg = w.segment(i * nn, nn).array();
        if (conj) {
          seg *= fq_values_.row(i).transpose().array().conjugate();
        } else {
          seg *= fq_values_.row(i).transpose().array();
        }
      }
      for (Index i = 0; i < d_; ++i) schur_.from_schur(rep_.grid, w.data() + i * nn);
      apply_on_axis(vb_, w, 1, d_, nn);
    };
    auto u12 = [&](Vector& w, const Matrix& u) { apply_on_axis(u, w, 1, d_ * n_, n_); };
    auto u13 = [&](Vector& w, const Matrix& u) {
      w = swap_grid_legs(w, d_, n_);
      apply_on_axis(u, w, 1, d_ * n_, n_);
      w = swap_grid_legs(w, d_, n_);
    };

    Vector lhs = v;
    Vector rhs = v;
    if (!adjoint) {
      chi_step(lhs, false);
      fq_step(lhs, false);
      u13(rhs, rep_.u);
      u12(rhs, rep_.u);
    } else {
      fq_step(lhs, true);
      chi_step(lhs, true);
      const Matrix uh = rep_.u.adjoint();
      u12(rhs, uh);
      u13(rhs, uh);
    }
    return lhs - rhs;
  }

 private:
  const Representation& rep_;
  Index d_;
  Index n_;
  Matrix vb_, va_;
  DeltaBSchur schur_;
  Matrix fq_values_;  // d x n^2
  Matrix chi_values_;  // d x n^2
  bool b_zero_ = false;
  bool degraded_ = false;
};

}  // namespace

CorepResidual corep_residual(const Representation& rep, int samples, std::uint64_t seed, const QExpParams& params,
                             const SpectralOptions& opts) {
  if (samples < 1) throw ParameterError("corep_residual: samples must be positive");
  const CorepDefect defect(rep, params, opts);
  CorepResidual out;
  out.degraded = defect.degraded();
  out.delta_b_schur_offdiag = defect.schur_offdiag();
  SplitMix rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector v = random_unit_vector(rng, defect.dim());
    out.residual = std::max(out.residual, defect.apply(v, false).norm());
  }
  return out;
}

CorepResidual corep_residual_norm(const Representation& rep, std::uint64_t seed, const QExpParams& params,
                                  const SpectralOptions& opts) {
  const CorepDefect defect(rep, params, opts);
  CorepResidual out;
  out.degraded = defect.degraded();
  out.delta_b_schur_offdiag = defect.schur_offdiag();
  out.residual = estimate_op_norm([&](const Vector& v) { return defect.apply(v, false); },
                                  [&](const Vector& v) { return defect.apply(v, true); }, defect.dim(), seed);
  return out;
}

Extraction extract_pair(const Representation& rep, const QExpParams& params, std::uint64_t seed,
                        const SpectralOptions& opts) {
  const GammaGrid& grid = rep.grid;
  const Index d = rep.h_dim;
  const Index n = grid.size();
  if (rep.u.rows() != d * n || rep.u.cols() != d * n) throw DimensionError("extract_pair: U has the wrong shape");

  // Matrix elements in the eigenbasis F* e_s of b: there
  // U_{s,s'} = F_q(b~ x_s) sum_alpha E_alpha [s' = s + p_alpha].
  const Matrix lift = kron(Matrix::Identity(d, d), grid.fourier());
  const Matrix ub = lift * rep.u * lift.adjoint();
  auto block = [&](Index s, Index s2) {
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) m(i, j) = ub(i * n + s, j * n + s2);
    }
    return m;
  };

  struct {
    double completeness = 0.0, family_unitarity = 0.0, family_commutator = 0.0, inversion_residual = 0.0;
    std::vector<std::string> flags;
  } out;
  std::vector<Matrix> g(static_cast<std::size_t>(n), Matrix::Zero(d, d));
  for (Index s = 0; s < n; ++s) {
    for (Index s2 = 0; s2 < n; ++s2) g[static_cast<std::size_t>(s)] += block(s, s2);
  }
  const Matrix id = Matrix::Identity(d, d);
  for (Index s = 0; s < n; ++s) {
    const Matrix& gs = g[static_cast<std::size_t>(s)];
    out.family_unitarity = std::max(out.family_unitarity, op_norm(gs * gs.adjoint() - id));
    for (Index t = s + 1; t < n; ++t) {
      const Matrix& gt = g[static_cast<std::size_t>(t)];
      out.family_commutator = std::max(out.family_commutator, op_norm(gs * gt - gt * gs));
    }
  }

  // Joint eigenvectors of the commuting family G(s) = F_q(b~ x_s).
  SplitMix rng(seed);
  Matrix combo = Matrix::Zero(d, d);
  for (Index s = 0; s < n; ++s) combo += rng.complex_gaussian() * g[static_cast<std::size_t>(s)];
  const EigenSystem joint = eig_normal(combo);
  const auto candidates = inversion_candidates(grid);
  std::vector<GammaPoint> beta;
  Vector beta_values(d);
  for (Index c = 0; c < d; ++c) {
    const Vector v = joint.vectors.col(c);
    std::vector<FamilySample> data;
    data.reserve(static_cast<std::size_t>(n));
    for (Index s = 0; s < n; ++s) {
      data.push_back({grid.point(s), v.dot(g[static_cast<std::size_t>(s)] * v)});
    }
    Inversion inv;
    try {
      inv = invert_fq_family(data, candidates, params);
    } catch (const ParameterError& e) {
      throw ExtractionError(std::string("extract_pair: joint eigenvector is not a common eigenvector (") +
                            e.what() + ")");
    }
    out.inversion_residual = std::max(out.inversion_residual, inv.residual);
    beta.push_back(inv.beta);
    beta_values(c) = inv.beta.value(grid.q());
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (std::abs(joint.values(i) - joint.values(j)) < 1e-7 && !(beta[i] == beta[j])) {
        out.flags.push_back("joint diagonalization: near-degenerate combination eigenvalues with distinct b~ values");
      }
    }
  }
  if (out.inversion_residual > 1e-6) {
    throw ExtractionError("extract_pair: b~ spectrum is not supported on the grid");
  }

  // E(alpha) = average over s of G(s)* U_{s, s + p_alpha}.
  Matrix a_t = Matrix::Zero(d, d);
  Matrix total = Matrix::Zero(d, d);
  for (Index t = 0; t < n; ++t) {
    Matrix e = Matrix::Zero(d, d);
    for (Index s = 0; s < n; ++s) e += g[static_cast<std::size_t>(s)].adjoint() * block(s, grid.translate(s, t));
    e /= static_cast<double>(n);
    total += e;
    a_t += grid.value(t) * e;
  }
  out.completeness = op_norm(total - id);
  if (out.completeness > 1e-6) throw ExtractionError("extract_pair: a~ spectrum is not supported on the grid");

  Q2Pair q2{NormalMatrix::from_spectral(joint.vectors, beta_values), NormalMatrix(a_t), grid.q(), grid.order(),
            0, id, id};
  return {PairOnH{q2, "extracted"}, out.completeness, out.family_unitarity, out.family_commutator,
          out.inversion_residual, std::move(out.flags), verify_q2(q2, 1e-10, opts)};
}

double weyl_residual(const PairOnH& pair, const SpectralOptions& opts) {
  double worst = 0.0;
  for (const auto& g : pair.pair.generators()) {
    worst = std::max(worst, windowed_weyl_residual(pair.b_t(), pair.a_t(), g, pair.pair.q, pair.pair.weyl_window,
                                                   1, opts));
  }
  return worst;
}

}  // namespace azb
