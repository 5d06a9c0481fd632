#include <gtest/gtest.h>

#include <bit>

#include "tetron/analytic.hpp"
#include "tetron/oracle.hpp"
#include "tetron/validation.hpp"

using namespace tetron;

namespace {

CMatrix parity_operator(int n) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * n);
  CMatrix p = CMatrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) p(x, x) = (std::popcount(static_cast<std::uint64_t>(x)) % 2) ? -1.0 : 1.0;
  return p;
}

// Dense matrix of c'_k in the given basis.
CMatrix dense_cprime(const DenseMajoranaSet& c, const RMatrix& o, int k) {
  CMatrix out = CMatrix::Zero(c[0].rows(), c[0].cols());
  for (int a = 0; a < o.cols(); ++a)
    if (o(k, a) != 0.0) out += o(k, a) * c[static_cast<std::size_t>(a)];
  return out;
}

}  // namespace

TEST(Majoranas, SingleSiteAlgebra) {
  const auto c = build_majoranas(1);
  ASSERT_EQ(c.size(), 4u);
  for (std::size_t a = 0; a < 4; ++a) {
    EXPECT_EQ(c[a].rows(), 4);
    for (std::size_t b = 0; b < 4; ++b) {
      const CMatrix ac = c[a] * c[b] + c[b] * c[a];
      const CMatrix expected = (a == b ? 2.0 : 0.0) * CMatrix::Identity(4, 4);
      EXPECT_EQ(max_abs(CMatrix(ac - expected)), 0.0) << a << " " << b;
    }
  }
}

TEST(Majoranas, HermitianSquareToIdentityAndAnticommute) {
  for (int n : {2, 3}) {
    const auto c = build_majoranas(n);
    const Eigen::Index dim = c[0].rows();
    for (std::size_t a = 0; a < c.size(); ++a) {
      EXPECT_LT(max_abs(CMatrix(c[a] - c[a].adjoint())), 1e-12);
      EXPECT_LT(max_abs(CMatrix(c[a] * c[a] - CMatrix::Identity(dim, dim))), 1e-12);
      for (std::size_t b = a + 1; b < c.size(); ++b) EXPECT_LT(max_abs(CMatrix(c[a] * c[b] + c[b] * c[a])), 1e-12);
    }
  }
  EXPECT_THROW(build_majoranas(6), std::invalid_argument);
  EXPECT_THROW(build_majoranas(0), std::invalid_argument);
}

TEST(Majoranas, AnnihilatorConvention) {
  // a_j = (c_{2j-1} + i c_{2j}) / 2 lowers the occupation of mode j.
  const auto c = build_majoranas(1);
  const CMatrix a = 0.5 * (c[0] + kI * c[1]);
  const CVector occupied = CVector::Unit(4, 1);
  EXPECT_LT(max_abs(CVector(a * occupied - CVector::Unit(4, 0))), 1e-15);
  EXPECT_LT(max_abs(CVector(a * CVector::Unit(4, 0))), 1e-15);
}

TEST(Majoranas, ParityCommutesWithBilinears) {
  const int n = 2;
  const auto c = build_majoranas(n);
  const CMatrix p = parity_operator(n);
  for (std::size_t a = 0; a < c.size(); ++a) {
    EXPECT_LT(max_abs(CMatrix(p * c[a] + c[a] * p)), 1e-12);
    for (std::size_t b = 0; b < c.size(); ++b) {
      const CMatrix q = c[a] * c[b];
      EXPECT_LT(max_abs(CMatrix(p * q - q * p)), 1e-12);
    }
  }
}

TEST(DenseTetron, MatchesDenseMatrices) {
  std::mt19937_64 gen(4);
  const auto model = detail::random_model(gen, 3, 1);
  const DenseTetron dense(model.evaluator().basis());
  const auto c = build_majoranas(3);
  const CVector psi = dense.logical_zero_state();
  for (int k : {0, 3, 7, 11}) {
    const CMatrix ck = dense_cprime(c, model.evaluator().basis().O, k);
    EXPECT_LT(max_abs(CVector(ck * psi - dense.cprime(k, psi))), 1e-12);
  }
  EXPECT_THROW(DenseTetron(BasisChange::identity(kDenseTetronMaxSites + 1)), std::invalid_argument);
}

TEST(DenseTetron, QpStabilizerIsWqpParity) {
  // (-1)^{phi^dag phi} = 1 - 2 phi^dag phi equals -i c'_{2l} c'_{2l+1} with phi = (c'_{2l} + i c'_{2l+1}) / 2.
  std::mt19937_64 gen(5);
  const int n = 3;
  for (bool fixed : {true, false}) {
    const TetronModel model = fixed ? TetronModel::fixed_point(n, 1) : detail::random_model(gen, n, 1);
    const RMatrix& o = model.evaluator().basis().O;
    const auto c = build_majoranas(n);
    const Eigen::Index dim = c[0].rows();
    for (int p = 1; p <= 2; ++p)
      for (int l = 1; l < n; ++l) {
        const CMatrix a = dense_cprime(c, o, cprime_index(n, p, 2 * l));
        const CMatrix b = dense_cprime(c, o, cprime_index(n, p, 2 * l + 1));
        const CMatrix phi = 0.5 * (a + kI * b);
        const CMatrix parity = CMatrix::Identity(dim, dim) - 2.0 * phi.adjoint() * phi;
        EXPECT_LT(max_abs(CMatrix(parity - (-kI) * a * b)), 1e-10);
      }
  }
}

TEST(LogicalZero, FixedPointExpectations) {
  const int n = 2;
  const auto stab = stabilizer_set({n, 0, 1});
  const DenseTetron dense(BasisChange::identity(n));
  const CVector psi = dense.logical_zero_state();
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  for (int p = 1; p <= 2; ++p)
    for (int l = 1; l < n; ++l) {
      const CVector q = dense.bilinear(cprime_index(n, p, 2 * l), cprime_index(n, p, 2 * l + 1), psi);
      EXPECT_NEAR(psi.dot(q).real(), 1.0, 1e-10);
    }
  EXPECT_NEAR(psi.dot(dense.apply_stabilizer(stab, 0, psi)).real(), 1.0, 1e-10);
  EXPECT_NEAR(psi.dot(parity_operator(n) * psi).real(), 1.0, 1e-10);
  const auto e = dense.expectations(psi, stab);
  EXPECT_NEAR(e.ps, 1.0, 1e-10);
  EXPECT_NEAR(e.znum, 1.0, 1e-10);
}

TEST(LogicalZero, SeedIndependentUpToPhase) {
  std::mt19937_64 gen(6);
  const auto model = detail::random_model(gen, 3, 1);
  const DenseTetron dense(model.evaluator().basis());
  EXPECT_NEAR(std::abs(dense.logical_zero_state(1).dot(dense.logical_zero_state(2))), 1.0, 1e-10);
  EXPECT_LT(max_abs(RMatrix(dense.covariance(dense.logical_zero_state()) - initial_covariance(3).M)), 1e-10);
}

TEST(Equivalence, HundredRandomPairsAtFourSites) {
  const auto r = gaussian_dense_equivalence(4, 100, 2024);
  EXPECT_LE(r.ps, 1e-8);
  EXPECT_LE(r.znum, 1e-8);
  EXPECT_LE(r.covariance, 1e-10);
}

TEST(ExactRates, NoNoise) {
  const auto model = TetronModel::fixed_point(4, 1);
  const auto r = exact_rates(model, 0.0);
  EXPECT_NEAR(r.p_loss, 0.0, 1e-12);
  EXPECT_NEAR(r.p_bitflip, 0.0, 1e-12);
}

TEST(ExactRates, FixedPointMatchesClosedForm) {
  for (int d : {0, 1}) {
    const auto r = exact_rates(TetronModel::fixed_point(4, d), 0.1);
    EXPECT_NEAR(r.p_loss, p_loss_fixed(d, 0.1), 1e-10);
    EXPECT_NEAR(r.p_bitflip, p_bitflip_fixed(d, 0.1), 1e-10);
  }
}

TEST(ExactRates, MatchesGaussianExhaustive) {
  const TetronModel model(ChainParams{0.3, 1.0, 0.4, 4, {}, 1}, ChainParams{0.3, 1.0, 0.4, 4, {}, 2},
                          CodeSpec{4, 1, 1});
  for (double q : {0.05, 0.2}) {
    const auto dense = exact_rates(model, q);
    const auto gauss = estimate_rates_exhaustive(model, q);
    EXPECT_NEAR(dense.p_loss, gauss.p_loss, 1e-10);
    EXPECT_NEAR(dense.p_bitflip, gauss.p_bitflip, 1e-10);
  }
  EXPECT_THROW(exact_rates(DenseTetron(BasisChange::identity(5)), stabilizer_set({5, 1, 1}), 0.1),
               std::invalid_argument);
}

TEST(OracleSuite, AllChecksPass) {
  const auto checks = run_oracle_suite();
  EXPECT_EQ(checks.size(), 11u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value << " > " << c.tolerance;
}
