#include <gtest/gtest.h>

#include <algorithm>

#include "azb/corep.hpp"
#include "azb/errors.hpp"
#include "azb/random.hpp"
#include "test_support.hpp"

using namespace azb;

namespace {

constexpr double kQ = 0.5;

QExpParams params() {
  QExpParams p;
  p.q = kQ;
  return p;
}

PairOnH make_pair(const std::vector<BlockSpec>& blocks, std::uint64_t seed, const GammaGrid& grid) {
  return {random_regular_pair(blocks, seed, grid), "test"};
}

}  // namespace

TEST(Coproduct, DeltaAIsProductSpectrum) {
  const GammaGrid grid(kQ, 4);
  const Coproduct c = coproduct(grid);
  const Matrix& da = c.delta_a.entries();
  for (Index p = 0; p < grid.size(); ++p) {
    for (Index r = 0; r < grid.size(); ++r) {
      EXPECT_LT(std::abs(da(p * 16 + r, p * 16 + r) - grid.value(p) * grid.value(r)), 1e-14);
    }
  }
  EXPECT_LT((da - Matrix(da.diagonal().asDiagonal())).norm(), 1e-15);
}

TEST(Coproduct, SizeGuard) { EXPECT_THROW(coproduct(GammaGrid(kQ, 10)), SizeGuardError); }

TEST(Coproduct, Coassociative) {
  const Coassociativity c = coassociativity_residuals(GammaGrid(kQ, 4), 1);
  EXPECT_EQ(c.on_a, 0.0);
  EXPECT_LT(c.on_b, 1e-12);
}

TEST(DeltaBSchurTest, TriangularizesDeltaB) {
  const GammaGrid grid(kQ, 4);
  const Index n = grid.size();
  const DeltaBSchur s = delta_b_schur(grid);
  Matrix v(n * n, n * n);
  for (Index c = 0; c < n * n; ++c) {
    Vector e = Vector::Unit(n * n, c);
    s.from_schur(grid, e.data());
    v.col(c) = e;
  }
  EXPECT_LT((v.adjoint() * v - Matrix::Identity(n * n, n * n)).norm(), 1e-12);
  const Matrix t = v.adjoint() * coproduct(grid).delta_b.entries() * v;
  double lower = 0.0, upper = 0.0;
  for (Index j = 0; j < t.cols(); ++j) {
    for (Index i = 0; i < t.rows(); ++i) {
      if (i > j) lower = std::max(lower, std::abs(t(i, j)));
      if (i < j) upper += std::norm(t(i, j));
    }
  }
  EXPECT_LT(lower, 1e-12);
  EXPECT_NEAR(std::sqrt(upper), s.schur_offdiag, 1e-10 * s.schur_offdiag);
  for (Index m = 0; m < n; ++m) {
    for (Index r = 0; r < n; ++r) EXPECT_LT(std::abs(t(m * n + r, m * n + r) - s.values(m, r)), 1e-12);
  }

  Vector w = Vector::Random(n * n);
  const Vector w0 = w;
  s.to_schur(grid, w.data());
  s.from_schur(grid, w.data());
  EXPECT_LT((w - w0).norm(), 1e-13);
}

TEST(BuildRep, TrivialBlockGivesCharacter) {
  const GammaGrid grid(kQ, 4);
  const GammaPoint g0 = grid.point(6);
  const Representation rep = build_rep(make_pair({BlockSpec::trivial(g0)}, 1, grid), grid, params());
  ASSERT_EQ(rep.u.rows(), 16);
  for (Index p = 0; p < 16; ++p) EXPECT_LT(std::abs(rep.u(p, p) - chi(g0, grid.point(p))), 1e-14);
  EXPECT_LT((rep.u - Matrix(rep.u.diagonal().asDiagonal())).norm(), 1e-14);
}

TEST(BuildRep, UnitaryForMixedPair) {
  const GammaGrid grid(kQ, 4);
  const Representation rep = build_rep(
      make_pair({BlockSpec::schrodinger(2), BlockSpec::trivial(grid.point(3))}, 2, grid), grid, params());
  EXPECT_EQ(rep.h_dim, 5);
  EXPECT_LT(rep.unitarity_defect(), 1e-10);
}

TEST(Corep, ClassicalPairSatisfiesIdentity) {
  const GammaGrid grid(kQ, 4);
  const Representation rep = build_rep(
      make_pair({BlockSpec::trivial(grid.point(1)), BlockSpec::trivial(grid.point(14))}, 3, grid), grid, params());
  const CorepResidual r = corep_residual(rep, 8, 1, params());
  EXPECT_LT(r.residual, 1e-9);
  EXPECT_FALSE(r.degraded);
  EXPECT_LT(corep_residual_norm(rep, 1, params()).residual, 1e-9);
}

TEST(Corep, SchrodingerBlockMatchesOracle) {
  const auto oracle = test::load_json("corep_oracle.json");
  const GammaGrid grid(kQ, 4);
  const std::uint64_t seed = oracle["seed"].get<std::uint64_t>();
  const Representation rep = build_rep(make_pair({BlockSpec::schrodinger(2)}, seed, grid), grid, params());
  const CorepResidual r = corep_residual(rep, oracle["samples"].get<int>(), seed, params());
  const double expected = oracle["schrodinger_block"]["4"].get<double>();
  EXPECT_NEAR(r.residual, expected, 0.02 * expected);
  EXPECT_TRUE(r.degraded);
  EXPECT_GE(corep_residual_norm(rep, seed, params()).residual, r.residual * (1.0 - 1e-6));
}

TEST(Extraction, TrivialBlocksRecoveredExactly) {
  const GammaGrid grid(kQ, 4);
  const std::vector<BlockSpec> blocks = {BlockSpec::trivial(grid.point(2)), BlockSpec::trivial(grid.point(9)),
                                         BlockSpec::trivial(grid.point(9))};
  const PairOnH pair = make_pair(blocks, 4, grid);
  const Extraction ex = extract_pair(build_rep(pair, grid, params()), params());
  EXPECT_LT(ex.pair.b_t().entries().norm(), 1e-12);
  EXPECT_LT((ex.pair.a_t().entries() - pair.a_t().entries()).norm(), 1e-12);
  EXPECT_TRUE(ex.flags.empty());
  EXPECT_LT(weyl_residual(ex.pair), 1e-12);
}

TEST(Extraction, RoundTripWithSchrodingerBlock) {
  const GammaGrid grid(kQ, 8);
  const auto blocks = random_block_specs_exact(7, grid, 4);
  const PairOnH pair = make_pair(blocks, 7, grid);
  const Extraction ex = extract_pair(build_rep(pair, grid, params()), params(), 7);
  EXPECT_LT(op_norm(ex.pair.b_t().entries() - pair.b_t().entries()), 1e-8);
  EXPECT_LT(op_norm(ex.pair.a_t().entries() - pair.a_t().entries()), 1e-8);
  EXPECT_LT(ex.completeness, 1e-10);
  EXPECT_LT(ex.family_unitarity, 1e-10);
  EXPECT_LT(ex.family_commutator, 1e-10);
  EXPECT_LT(ex.inversion_residual, 1e-12);
  EXPECT_TRUE(ex.flags.empty());
}

TEST(Extraction, IndependentOfCombinationSeed) {
  const GammaGrid grid(kQ, 4);
  const PairOnH pair = make_pair({BlockSpec::schrodinger(2), BlockSpec::trivial(grid.point(5))}, 11, grid);
  const Representation rep = build_rep(pair, grid, params());
  const Extraction first = extract_pair(rep, params(), 1);
  for (std::uint64_t seed = 2; seed <= 4; ++seed) {
    const Extraction other = extract_pair(rep, params(), seed);
    EXPECT_LT(op_norm(other.pair.b_t().entries() - first.pair.b_t().entries()), 1e-10);
    EXPECT_LT(op_norm(other.pair.a_t().entries() - first.pair.a_t().entries()), 1e-10);
  }
}

TEST(Extraction, RejectsNonRepresentation) {
  const GammaGrid grid(kQ, 4);
  SplitMix rng(3);
  Representation rep{random_unitary(rng, 32), grid, 2, std::nullopt};
  EXPECT_THROW(extract_pair(rep, params()), ExtractionError);
}

TEST(WeylResidual, CorruptedPairBoundedBelow) {
  const GammaGrid grid(kQ, 8);
  PairOnH pair = make_pair({BlockSpec::trivial(grid.point(3)), BlockSpec::trivial(grid.point(20))}, 1, grid);
  EXPECT_LT(weyl_residual(pair), 1e-14);
  pair.pair.y = NormalMatrix(pair.pair.y.entries() + Matrix::Identity(2, 2));
  // chi(a, g) I chi(a, g)* - g I = (1 - g) I.
  EXPECT_GE(weyl_residual(pair), 1.0 - kQ - 1e-12);
}
