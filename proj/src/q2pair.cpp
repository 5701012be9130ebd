#include "azb/q2pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "azb/errors.hpp"
#include "azb/random.hpp"

namespace azb {

std::vector<GammaPoint> Q2Pair::generators() const {
  return {GammaPoint::from_turns(1, Turns()), GammaPoint::from_turns(0, Turns(1, phase_order))};
}

Q2Pair schrodinger_pair(const GammaGrid& grid, int margin) {
  const int m = margin < 0 ? grid.order() / 4 : margin;
  const Vector x = grid.values();
  const Matrix& f = grid.fourier();
  const Vector mask = grid.interior_mask(m);

  Q2Pair pair{NormalMatrix::from_spectral(f.adjoint(), x), NormalMatrix::diagonal(x), grid.q(), grid.order(), m,
              Matrix(), Matrix()};
  pair.weyl_window = f.adjoint() * mask.asDiagonal() * f;
  pair.exp_window = mask.asDiagonal() * pair.weyl_window;
  return pair;
}

const Check* Q2Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double windowed_weyl_residual(const NormalMatrix& y, const NormalMatrix& x, const GammaPoint& g, double q,
                              const Matrix& window, int power, const SpectralOptions& opts) {
  if (y.dim() != x.dim() || window.rows() != x.dim()) throw DimensionError("weyl residual: dimension mismatch");
  const Matrix c = chi_op(x, g, q, opts);
  const Complex scale = std::pow(g.value(q), power);
  const Matrix r = c * y.entries() * c.adjoint() - scale * y.entries();
  return op_norm(window * r * window);
}

namespace {

// Largest relative lattice distance over the nonzero spectrum, and the
// smallest eigenvalue modulus.
std::pair<double, double> spectrum_stats(const NormalMatrix& t, double q, double zero_tol) {
  const Vector& values = t.eigensystem().values;
  double worst = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < values.size(); ++i) {
    const double a = std::abs(values(i));
    smallest = std::min(smallest, a);
    if (a > zero_tol) worst = std::max(worst, relative_gamma_distance(values(i), q));
  }
  return {worst, smallest};
}

}  // namespace

Q2Report verify_q2(const Q2Pair& pair, double tol, const SpectralOptions& opts) {
  Q2Report report;
  auto add = [&](std::string name, double value, double threshold, bool pass) {
    report.checks.push_back({std::move(name), value, threshold, pass});
  };

  add("normality_Y", pair.y.normality_defect(), pair.y.defect_threshold(opts),
      pair.y.normality_defect() <= pair.y.defect_threshold(opts));
  add("normality_X", pair.x.normality_defect(), pair.x.defect_threshold(opts),
      pair.x.normality_defect() <= pair.x.defect_threshold(opts));

  const double zero_tol_y = opts.snap_tol * std::max(1.0, pair.y.norm());
  const double zero_tol_x = opts.snap_tol * std::max(1.0, pair.x.norm());
  const auto [dist_y, min_y] = spectrum_stats(pair.y, pair.q, zero_tol_y);
  const auto [dist_x, min_x] = spectrum_stats(pair.x, pair.q, zero_tol_x);
  (void)min_y;
  const bool spectra_ok = dist_y <= opts.snap_tol && dist_x <= opts.snap_tol;
  add("spectrum_Y", dist_y, opts.snap_tol, dist_y <= opts.snap_tol);
  add("spectrum_X", dist_x, opts.snap_tol, dist_x <= opts.snap_tol);
  add("kernel_X", min_x, zero_tol_x, min_x > zero_tol_x);

  const char* names[] = {"weyl_modulus_generator", "weyl_phase_generator"};
  const auto gens = pair.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (!spectra_ok || min_x <= zero_tol_x) {
      add(names[i], std::numeric_limits<double>::infinity(), tol, false);
      continue;
    }
    const double r = windowed_weyl_residual(pair.y, pair.x, gens[i], pair.q, pair.weyl_window, 1, opts);
    add(names[i], r, tol, r <= tol);
  }

  report.pass = std::all_of(report.checks.begin(), report.checks.end(), [](const Check& c) { return c.pass; });
  return report;
}

ExpIdentityReport exp_identity_residual(const Q2Pair& pair, const QExpParams& params, const SpectralOptions& opts) {
  const ClosureSum sum = closure_sum(pair.x, pair.y, pair.q);
  const CalculusResult f_sum = fq_on_operator_unsnapped(sum.sum, params, opts);
  const CalculusResult f_x = fq_on_operator(pair.x, params, opts);
  const CalculusResult f_y = fq_on_operator(pair.y, params, opts);

  ExpIdentityReport out;
  out.residual = op_norm((f_sum.value - f_y.value * f_x.value) * pair.exp_window);
  out.residual_swapped = op_norm((f_sum.value - f_x.value * f_y.value) * pair.exp_window);
  out.sum_defect = sum.normality_defect;
  out.gamma_distance = sum.gamma_distance;
  out.degraded = f_sum.degraded || f_x.degraded || f_y.degraded;
  return out;
}

std::string BlockSpec::describe() const {
  std::ostringstream os;
  if (kind == Kind::trivial) {
    os << "trivial(" << gamma0.to_string() << ")";
  } else {
    os << "schrodinger(" << order << ")";
  }
  return os.str();
}

namespace {

struct BlockData {
  Matrix b_vectors;
  Vector b_values;
  Matrix a_vectors;
  Vector a_values;
  Matrix window;
  int margin = 0;
};

BlockData make_block(const BlockSpec& spec, const GammaGrid& grid) {
  BlockData blk;
  if (spec.kind == BlockSpec::Kind::trivial) {
    if (spec.gamma0.is_zero()) throw KernelConditionError("trivial block: gamma0 must be nonzero");
    blk.b_vectors = Matrix::Identity(1, 1);
    blk.b_values = Vector::Zero(1);
    blk.a_vectors = Matrix::Identity(1, 1);
    blk.a_values = Vector::Constant(1, spec.gamma0.value(grid.q()));
    blk.window = Matrix::Identity(1, 1);
    return blk;
  }
  if (spec.order < 2 || spec.order % 2 != 0 || grid.order() % spec.order != 0) {
    throw ParameterError("schrodinger block: order must be even and divide the grid order");
  }
  const GammaGrid sub(grid.q(), spec.order);
  const Q2Pair p = schrodinger_pair(sub, std::max(1, spec.order / 4));
  blk.b_vectors = p.y.eigensystem().vectors;
  blk.b_values = p.y.eigensystem().values;
  blk.a_vectors = p.x.eigensystem().vectors;
  blk.a_values = p.x.eigensystem().values;
  blk.window = p.weyl_window;
  blk.margin = p.margin;
  return blk;
}

}  // namespace

Q2Pair random_regular_pair(std::span<const BlockSpec> blocks, std::uint64_t seed, const GammaGrid& grid,
                           Mixing mixing) {
  if (blocks.empty()) throw ParameterError("random_regular_pair: no blocks");
  SplitMix rng(seed);

  Index d = 0;
  for (const auto& b : blocks) d += b.dim();
  Matrix bv = Matrix::Zero(d, d), av = Matrix::Zero(d, d), window = Matrix::Zero(d, d);
  Vector bl(d), al(d);
  int phase_order = 0;
  int margin = 0;

  Index off = 0;
  for (const auto& spec : blocks) {
    BlockData blk = make_block(spec, grid);
    const Index n = spec.dim();
    if (mixing == Mixing::within_blocks) {
      const Matrix w = random_unitary(rng, n);
      blk.b_vectors = w * blk.b_vectors;
      blk.a_vectors = w * blk.a_vectors;
      blk.window = w * blk.window * w.adjoint();
    }
    bv.block(off, off, n, n) = blk.b_vectors;
    av.block(off, off, n, n) = blk.a_vectors;
    window.block(off, off, n, n) = blk.window;
    bl.segment(off, n) = blk.b_values;
    al.segment(off, n) = blk.a_values;
    if (spec.kind == BlockSpec::Kind::schrodinger) phase_order = std::gcd(phase_order, spec.order);
    margin = std::max(margin, blk.margin);
    off += n;
  }
  if (mixing == Mixing::global) {
    const Matrix w = random_unitary(rng, d);
    bv = w * bv;
    av = w * av;
    window = w * window * w.adjoint();
  }

  Q2Pair pair{NormalMatrix::from_spectral(bv, bl), NormalMatrix::from_spectral(av, al), grid.q(),
              phase_order == 0 ? grid.order() : phase_order, margin, window, window};
  return pair;
}

namespace {

std::vector<BlockSpec> fill_blocks(SplitMix& rng, const GammaGrid& grid, Index target) {
  std::vector<BlockSpec> out;
  Index d = 0;
  while (d < target) {
    if (target - d >= 4 && rng.uniform() < 0.5) {
      out.push_back(BlockSpec::schrodinger(2));
      d += 4;
    } else {
      const Index p = rng.uniform_int(0, static_cast<int>(grid.size()) - 1);
      out.push_back(BlockSpec::trivial(grid.point(p)));
      d += 1;
    }
  }
  return out;
}

}  // namespace

std::vector<BlockSpec> random_block_specs(std::uint64_t seed, const GammaGrid& grid, Index max_dim) {
  if (max_dim < 1) throw ParameterError("random_block_specs: max_dim must be positive");
  SplitMix rng(seed ^ 0x5DEECE66DULL);
  const Index target = max_dim == 1 ? 1 : rng.uniform_int(2, static_cast<int>(max_dim));
  return fill_blocks(rng, grid, target);
}

std::vector<BlockSpec> random_block_specs_exact(std::uint64_t seed, const GammaGrid& grid, Index dim) {
  if (dim < 1) throw ParameterError("random_block_specs_exact: dim must be positive");
  SplitMix rng(seed ^ 0x5DEECE66DULL);
  return fill_blocks(rng, grid, dim);
}

}  // namespace azb
