#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "azb/errors.hpp"
#include "azb/gamma.hpp"
#include "azb/random.hpp"

using namespace azb;

namespace {

GammaPoint random_lattice_point(SplitMix& rng) {
  const int k = rng.uniform_int(-6, 6);
  if (rng.uniform() < 0.5) return GammaPoint::from_turns(k, Turns(rng.uniform_int(0, 23), 24));
  return GammaPoint::make(k, kTwoPi * rng.uniform());
}

}  // namespace

TEST(MakePoint, IdentityIsNotSingular) {
  const GammaPoint g = GammaPoint::make(0, 0.0);
  EXPECT_EQ(g.value(0.5), Complex(1.0, 0.0));
  EXPECT_FALSE(g.is_singular());
}

TEST(MakePoint, SingularSetMembership) {
  EXPECT_TRUE(GammaPoint::make(-2, kPi).is_singular());
  EXPECT_TRUE(GammaPoint::make(0, kPi).is_singular());
  EXPECT_TRUE(GammaPoint::make(-4, -kPi).is_singular());
  EXPECT_FALSE(GammaPoint::make(-1, kPi).is_singular());
  EXPECT_FALSE(GammaPoint::make(2, kPi).is_singular());
  EXPECT_FALSE(GammaPoint::make(-2, kPi - 1e-15).is_singular());
  EXPECT_FALSE(GammaPoint::zero().is_singular());
}

TEST(MakePoint, ThetaReducedToPrincipalRange) {
  const GammaPoint g = GammaPoint::make(1, -kPi / 2);
  EXPECT_NEAR(g.theta(), 3 * kPi / 2, 1e-15);
  EXPECT_THROW(GammaPoint::make(0, std::nan("")), DomainError);
}

TEST(Snap, LatticeAndZeroAndOffLattice) {
  const GammaPoint g = GammaPoint::snap(std::polar(4.0 * (1 + 1e-12), kPi / 4), 0.5);
  EXPECT_EQ(g.k(), -2);
  ASSERT_TRUE(g.turns().has_value());
  EXPECT_EQ(*g.turns(), Turns(1, 8));
  EXPECT_TRUE(GammaPoint::snap({1e-12, 0.0}, 0.5).is_zero());
  EXPECT_THROW(GammaPoint::snap({1.1, 0.0}, 0.5), SpectralDomainError);
}

TEST(Snap, NearMinusOneIsExactlySingular) {
  const GammaPoint g = GammaPoint::snap({-4.0, 3e-16}, 0.5);
  EXPECT_TRUE(g.is_singular());
}

TEST(Chi, PhaseOfGammaAgainstQ) {
  const GammaPoint g = GammaPoint::make(3, kPi / 2);
  const GammaPoint q = GammaPoint::make(1, 0.0);
  EXPECT_NEAR(std::abs(chi(g, q) - Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_EQ(chi(GammaPoint::from_turns(3, Turns(1, 4)), GammaPoint::from_turns(1, Turns())), Complex(0.0, 1.0));
}

TEST(Chi, AgainstOneIsOne) {
  SplitMix rng(3);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(chi(random_lattice_point(rng), GammaPoint::make(0, 0.0)), Complex(1.0, 0.0));
}

TEST(Chi, ClosedFormExample) {
  const GammaPoint g1 = GammaPoint::make(1, kPi / 2);
  const GammaPoint g2 = GammaPoint::make(2, 0.0);
  EXPECT_NEAR(std::abs(chi(g1, g2) - Complex(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(Chi, ZeroArgumentIsDomainError) {
  EXPECT_THROW(chi(GammaPoint::zero(), GammaPoint::make(0, 0.0)), DomainError);
}

TEST(Chi, MultiplicativeSymmetricUnimodular) {
  SplitMix rng(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GammaPoint a = random_lattice_point(rng), b = random_lattice_point(rng), c = random_lattice_point(rng);
    worst = std::max(worst, std::abs(chi(a * b, c) - chi(a, c) * chi(b, c)));
    worst = std::max(worst, std::abs(chi(a, b) - chi(b, a)));
    worst = std::max(worst, std::abs(std::abs(chi(a, b)) - 1.0));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Chi, InvariantUnderFullTurn) {
  SplitMix rng(5);
  for (int i = 0; i < 100; ++i) {
    const int k = rng.uniform_int(-5, 5);
    const double t = kTwoPi * rng.uniform();
    const GammaPoint other = random_lattice_point(rng);
    EXPECT_NEAR(std::abs(chi(GammaPoint::make(k, t), other) - chi(GammaPoint::make(k, t + kTwoPi), other)), 0.0,
                1e-12);
  }
}

TEST(Chi, ImaginaryPowerOfModulus) {
  // chi(gamma, q^{it}) = |gamma|^{it} with q^{it} = e^{i t ln q}.
  const double q = 0.5;
  SplitMix rng(9);
  for (int i = 0; i < 100; ++i) {
    const int k = rng.uniform_int(-6, 6);
    const double t = 4.0 * rng.uniform() - 2.0;
    const GammaPoint g = GammaPoint::make(k, kTwoPi * rng.uniform());
    const GammaPoint u = GammaPoint::make(0, t * std::log(q));
    const Complex expected = std::exp(Complex(0.0, t * std::log(std::abs(g.value(q)))));
    EXPECT_NEAR(std::abs(chi(g, u) - expected), 0.0, 1e-12);
  }
}

TEST(Grid, RejectsInvalidParameters) {
  EXPECT_THROW(GammaGrid(0.0, 4), ParameterError);
  EXPECT_THROW(GammaGrid(1.0, 4), ParameterError);
  EXPECT_THROW(GammaGrid(0.5, 5), ParameterError);
  EXPECT_THROW(GammaGrid(0.5, 0), ParameterError);
  EXPECT_FALSE(GammaGrid(0.05, 4).warnings().empty());
  EXPECT_TRUE(GammaGrid(0.5, 4).warnings().empty());
}

TEST(Grid, OrderTwoPoints) {
  const GammaGrid grid(0.5, 2);
  const Vector v = grid.values();
  const Complex expected[] = {{1.0, 0.0}, {-1.0, 0.0}, {2.0, 0.0}, {-2.0, 0.0}};
  for (int p = 0; p < 4; ++p) EXPECT_NEAR(std::abs(v(p) - expected[p]), 0.0, 1e-15);
}

TEST(Grid, CenteredModuli) {
  const GammaGrid grid(0.5, 4);
  EXPECT_EQ(grid.size(), 16);
  std::set<int> ks;
  for (const auto& g : grid.points()) ks.insert(g.k());
  EXPECT_EQ(ks, (std::set<int>{-2, -1, 0, 1}));
}

TEST(Grid, PairingMatchesBicharacterExhaustively) {
  const GammaGrid grid(0.5, 4);
  for (Index p = 0; p < grid.size(); ++p) {
    for (Index r = 0; r < grid.size(); ++r) EXPECT_EQ(grid.pairing(p, r), chi(grid.point(p), grid.point(r)));
  }
}

TEST(Fourier, DeltaAtOriginIsConstant) {
  const GammaGrid grid(0.5, 6);
  Vector v = Vector::Zero(grid.size());
  v(grid.index(0, 0)) = 1.0;
  const Vector f = grid.fourier_apply(v);
  EXPECT_NEAR((f - Vector::Constant(grid.size(), 1.0 / 6.0)).norm(), 0.0, 1e-15);
}

TEST(Fourier, UnitaryAndInvertible) {
  for (int m : {2, 4, 8, 16}) {
    const GammaGrid grid(0.5, m);
    const Matrix& f = grid.fourier();
    const Matrix id = Matrix::Identity(grid.size(), grid.size());
    EXPECT_LT((f * f.adjoint() - id).norm(), 1e-12) << m;
    EXPECT_LT((f.adjoint() * f - id).norm(), 1e-12) << m;
  }
  const GammaGrid grid(0.5, 8);
  SplitMix rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vector v = random_unit_vector(rng, grid.size());
    const Vector fv = grid.fourier_apply(v);
    EXPECT_NEAR(fv.norm(), 1.0, 1e-12);
    EXPECT_LT((grid.fourier_adjoint_apply(fv) - v).norm(), 1e-12);
    EXPECT_LT((fv - grid.fourier() * v).norm(), 1e-12);
  }
  EXPECT_THROW(grid.fourier_apply(Vector::Zero(5)), DimensionError);
}

TEST(Fourier, SquareIsParity) {
  const GammaGrid grid(0.5, 6);
  const Matrix f2 = grid.fourier() * grid.fourier();
  for (Index p = 0; p < grid.size(); ++p) {
    for (Index r = 0; r < grid.size(); ++r) {
      EXPECT_NEAR(std::abs(f2(p, r) - (r == grid.negate(p) ? 1.0 : 0.0)), 0.0, 1e-12);
    }
  }
}

TEST(Fourier, ConjugatedDiagonalKeepsSpectrum) {
  const GammaGrid grid(0.5, 4);
  const Vector x = grid.values();
  const Matrix y = grid.fourier().adjoint() * x.asDiagonal() * grid.fourier();
  Eigen::ComplexEigenSolver<Matrix> es(y);
  std::vector<Complex> left(es.eigenvalues().data(), es.eigenvalues().data() + x.size());
  for (Index i = 0; i < x.size(); ++i) {
    auto it = std::min_element(left.begin(), left.end(),
                               [&](Complex a, Complex b) { return std::abs(a - x(i)) < std::abs(b - x(i)); });
    EXPECT_NEAR(std::abs(*it - x(i)), 0.0, 1e-11);
    left.erase(it);
  }
}
