#include <gtest/gtest.h>

#include <random>

#include "tetron/gaussian.hpp"
#include "tetron/oracle.hpp"
#include "tetron/validation.hpp"

using namespace tetron;

namespace {

CVector dense_linear(const DenseTetron& dense, const CVector& v, const CVector& psi) {
  CVector out = CVector::Zero(psi.size());
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (v(k) != cplx(0.0)) out += v(k) * dense.cprime(static_cast<int>(k), psi);
  return out;
}

// Fixed-point rule: region r of chain p is sites 1..d+1 (left) or n-d..n (right).
// P_S = 1 iff no region is partially hit and 0, 2 or 4 regions are fully hit;
// the logical Z flips iff exactly one of chain 1's regions is fully hit.
struct RuleOutcome {
  double ps;
  double znum;
};

RuleOutcome fixed_point_rule(const ErrorSample& s, int d) {
  const int n = s.n;
  int full = 0;
  bool partial = false;
  bool chain1_full[2] = {false, false};
  for (int p = 1; p <= 2; ++p)
    for (int r = 0; r < 2; ++r) {
      const int lo = r == 0 ? 1 : n - d;
      const int hi = r == 0 ? d + 1 : n;
      int hit = 0;
      for (int j : s.chain(p)) hit += (j >= lo && j <= hi);
      if (hit == hi - lo + 1) {
        ++full;
        if (p == 1) chain1_full[r] = true;
      } else if (hit > 0) {
        partial = true;
      }
    }
  if (partial || full % 2 == 1) return {0.0, 0.0};
  return {1.0, chain1_full[0] != chain1_full[1] ? -1.0 : 1.0};
}

}  // namespace

TEST(InitialCovariance, TwoSitePattern) {
  const auto s = initial_covariance(2);
  RMatrix chain(4, 4);
  chain << 0, 0, 0, 1,
           0, 0, 1, 0,
           0, -1, 0, 0,
           -1, 0, 0, 0;
  EXPECT_EQ(s.M.topLeftCorner(4, 4), chain);
  EXPECT_EQ(s.M.bottomRightCorner(4, 4), chain);
  EXPECT_EQ(s.M.topRightCorner(4, 4), RMatrix::Zero(4, 4));
  EXPECT_THROW(initial_covariance(1), std::invalid_argument);
}

TEST(InitialCovariance, PureAndAntisymmetric) {
  for (int n : {2, 3, 10, 30}) {
    const auto s = initial_covariance(n);
    EXPECT_EQ(s.antisymmetry_residual(), 0.0);
    EXPECT_EQ(s.purity_residual(), 0.0);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(InitialCovariance, OddZetaFlipsEdgePairing) {
  const auto s = initial_covariance(5, 1);
  EXPECT_EQ(s.M(0, 9), -1.0);
  EXPECT_EQ(s.M(10, 19), -1.0);
  EXPECT_EQ(s.M(1, 2), 1.0);
}

TEST(InitialCovariance, MatchesDenseLogicalZero) {
  for (int n : {2, 3, 4}) {
    const DenseTetron dense(BasisChange::identity(n));
    EXPECT_LT(max_abs(RMatrix(dense.covariance(dense.logical_zero_state()) - initial_covariance(n).M)), 1e-10);
  }
  std::mt19937_64 gen(8);
  const auto model = detail::random_model(gen, 4, 1);
  const DenseTetron dense(model.evaluator().basis());
  EXPECT_LT(max_abs(RMatrix(dense.covariance(dense.logical_zero_state()) - initial_covariance(4).M)), 1e-10);
}

TEST(ErrorRotation, EmptySampleIsIdentity) {
  std::mt19937_64 gen(1);
  const auto model = detail::random_model(gen, 6, 1);
  const RMatrix r = error_rotation({6, {}, {}}, model.evaluator().basis());
  EXPECT_LT(max_abs(RMatrix(r - RMatrix::Identity(24, 24))), 1e-12);
}

TEST(ErrorRotation, SingleSiteFlipsBothMajoranas) {
  const RMatrix r = error_rotation({3, {2}, {}}, BasisChange::identity(3));
  RVector diag = RVector::Ones(12);
  diag(2) = diag(3) = -1.0;
  EXPECT_EQ(r, RMatrix(diag.asDiagonal()));
  EXPECT_EQ(RMatrix(r * r), RMatrix::Identity(12, 12));
}

TEST(ErrorRotation, OrthogonalAndPurityPreserving) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    const int n = 4 + t % 7;
    const auto model = detail::random_model(gen, n, 0);
    const auto s = sample_error(gen, 0.3, n);
    const RMatrix r = error_rotation(s, model.evaluator().basis());
    EXPECT_LT(max_abs(RMatrix(r * r.transpose() - RMatrix::Identity(4 * n, 4 * n))), 1e-10);
    const auto m = apply_error(initial_covariance(n), s, model.evaluator().basis());
    EXPECT_LT(m.purity_residual(), 1e-9);
    EXPECT_LT(m.antisymmetry_residual(), 1e-12);
  }
  EXPECT_THROW(error_rotation({3, {1}, {}}, BasisChange::identity(4)), std::out_of_range);
  EXPECT_THROW(error_rotation({3, {4}, {}}, BasisChange::identity(3)), std::out_of_range);
}

TEST(ErrorRotation, MatchesDenseCovariance) {
  std::mt19937_64 gen(3);
  const auto model = detail::random_model(gen, 4, 1);
  const auto& basis = model.evaluator().basis();
  const DenseTetron dense(basis);
  const DenseState zero = dense.logical_zero_state();
  for (int t = 0; t < 50; ++t) {
    const auto s = sample_error(gen, 0.4, 4);
    const RMatrix expected = dense.covariance(dense.apply_error(s, zero));
    EXPECT_LT(max_abs(RMatrix(apply_error(initial_covariance(4), s, basis).M - expected)), 1e-10);
  }
}

TEST(SecondMoments, Examples) {
  const auto s = initial_covariance(3);
  const auto a = second_moments(s.M, {LinearOp::single(1), LinearOp::single(2)});
  EXPECT_EQ(a.A(0, 1), kI);
  EXPECT_EQ(a.A(1, 0), -kI);
  EXPECT_EQ(a.m(), 1);
  const auto b = second_moments(s.M, {LinearOp::single(4), LinearOp::single(4)});
  EXPECT_EQ(b.A(0, 1), cplx(1.0));
  EXPECT_THROW(second_moments(s.M, {LinearOp::single(0)}), std::invalid_argument);
  EXPECT_THROW(second_moments(s, {CVector::Zero(3), CVector::Zero(3)}), std::invalid_argument);
}

TEST(SecondMoments, MatchDenseExpectations) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  const auto model = detail::random_model(gen, 3, 1);
  const auto& basis = model.evaluator().basis();
  const DenseTetron dense(basis);
  const DenseState zero = dense.logical_zero_state();
  for (int t = 0; t < 10; ++t) {
    const auto s = sample_error(gen, 0.3, 3);
    const DenseState psi = dense.apply_error(s, zero);
    const auto cov = apply_error(initial_covariance(3), s, basis);
    std::vector<CVector> ops;
    for (int k = 0; k < 4; ++k) {
      CVector v(12);
      for (int a = 0; a < 12; ++a) v(a) = cplx(g(gen), g(gen));
      ops.push_back(v);
    }
    const auto a = second_moments(cov, ops);
    for (int x = 0; x < 4; ++x)
      for (int y = x + 1; y < 4; ++y) {
        const cplx expected = psi.dot(dense_linear(dense, ops[x], dense_linear(dense, ops[y], psi)));
        EXPECT_LT(std::abs(a.A(x, y) - expected), 1e-10);
      }
    // Wick: <L1 L2 L3 L4> = Pf(A).
    const cplx four = psi.dot(dense_linear(dense, ops[0], dense_linear(dense, ops[1],
                              dense_linear(dense, ops[2], dense_linear(dense, ops[3], psi)))));
    EXPECT_LT(std::abs(pfaffian(a) - four), 1e-9 * std::max(1.0, std::abs(four)));
  }
}

TEST(Expectations, CodeStateIsStabilized) {
  for (int d = 0; d <= 4; ++d) {
    const auto stab = stabilizer_set({10, d, 1});
    EXPECT_NEAR(expectation_PS(initial_covariance(10), stab), 1.0, 1e-10);
    EXPECT_NEAR(expectation_Znum(initial_covariance(10), stab), 1.0, 1e-10);
    EXPECT_NEAR(expectation_Znum(initial_covariance(10, 1), stab), -1.0, 1e-10);
  }
}

TEST(Expectations, SingleErrorInsideIntervalIsDetected) {
  const int n = 8;
  const auto stab = stabilizer_set({n, 2, 1});
  const auto basis = BasisChange::identity(n);
  for (int p = 1; p <= 2; ++p)
    for (int j : {1, 2, 3, 6, 7, 8}) {
      ErrorSample s{n, {}, {}};
      (p == 1 ? s.J1 : s.J2).push_back(j);
      const auto m = apply_error(initial_covariance(n), s, basis);
      EXPECT_NEAR(expectation_PS(m, stab), 0.0, 1e-10) << p << " " << j;
    }
}

TEST(Expectations, OneRegionPerChainIsUndetectedBitFlip) {
  const int n = 4, d = 1;
  const auto stab = stabilizer_set({n, d, 1});
  const auto basis = BasisChange::identity(n);
  const ErrorSample s{n, {1, 2}, {3, 4}};
  const auto m = apply_error(initial_covariance(n), s, basis);
  const double ps = expectation_PS(m, stab);
  EXPECT_NEAR(ps, 1.0, 1e-10);
  EXPECT_NEAR(expectation_Znum(m, stab), -ps, 1e-10);
  const DenseTetron dense(basis);
  const auto de = dense.expectations(dense.apply_error(s, dense.logical_zero_state()), stab);
  EXPECT_NEAR(de.ps, 1.0, 1e-10);
  EXPECT_NEAR(de.znum, -1.0, 1e-10);
}

TEST(Expectations, FixedPointCombinatorialRuleExhaustive) {
  for (auto [n, d] : {std::pair{6, 1}, std::pair{6, 2}, std::pair{5, 0}}) {
    const auto model = TetronModel::fixed_point(n, d);
    const auto& ev = model.evaluator();
    const std::uint64_t per_chain = std::uint64_t{1} << n;
    for (std::uint64_t m1 = 0; m1 < per_chain; ++m1)
      for (std::uint64_t m2 = 0; m2 < per_chain; ++m2) {
        const auto s = ErrorSample::from_masks(n, m1, m2);
        const auto e = ev.evaluate(s);
        const auto rule = fixed_point_rule(s, d);
        ASSERT_NEAR(e.ps, rule.ps, 1e-10) << n << " " << d << " " << m1 << " " << m2;
        ASSERT_NEAR(e.znum, rule.znum, 1e-10) << n << " " << d << " " << m1 << " " << m2;
      }
  }
}

TEST(Expectations, MatchDenseOracleAtFourSites) {
  const auto r = gaussian_dense_equivalence(4, 40, 99);
  EXPECT_LT(r.ps, 1e-8);
  EXPECT_LT(r.znum, 1e-8);
  EXPECT_LT(r.covariance, 1e-10);
}

TEST(Expectations, BoundsOnRandomStates) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 30; ++t) {
    const int n = 6 + t % 10;
    const auto model = detail::random_model(gen, n, t % (n / 2));
    const auto e = model.evaluator().evaluate(sample_error(gen, 0.2, n));
    EXPECT_GE(e.ps, 0.0);
    EXPECT_LE(e.ps, 1.0);
    EXPECT_LE(std::abs(e.znum), e.ps + 1e-9);
  }
}

TEST(Evaluator, FastPathMatchesFullCovariance) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 20; ++t) {
    const int n = 10;
    const auto model = detail::random_model(gen, n, t % 5);
    const auto& ev = model.evaluator();
    const auto s = sample_error(gen, 0.15, n);
    const auto full = apply_error(initial_covariance(n), s, ev.basis());
    const auto fast = ev.evaluate(s);
    EXPECT_NEAR(fast.ps, expectation_PS(full, ev.stabilizers()), 1e-12);
    EXPECT_NEAR(fast.znum, expectation_Znum(full, ev.stabilizers()), 1e-12);
  }
}

TEST(Evaluator, RejectsMismatchedSizes) {
  EXPECT_THROW(GaussianEvaluator(BasisChange::identity(4), stabilizer_set({5, 1, 1}), initial_covariance(4)),
               std::invalid_argument);
}

TEST(Clamp, SmallExcursionsClampedLargeOnesThrow) {
  EXPECT_EQ(detail::clamp_unit(-5e-10, 1e-9, "x"), 0.0);
  EXPECT_EQ(detail::clamp_unit(1.0 + 5e-10, 1e-9, "x"), 1.0);
  EXPECT_EQ(detail::clamp_unit(0.25, 1e-9, "x"), 0.25);
  EXPECT_THROW(detail::clamp_unit(-1e-6, 1e-9, "x"), InvariantError);
  EXPECT_THROW(detail::clamp_unit(1.1, 1e-9, "x"), InvariantError);
}

TEST(Clamp, CorruptedCovarianceIsHardError) {
  auto s = initial_covariance(4);
  s.M *= 3.0;
  EXPECT_THROW(expectation_PS(s, stabilizer_set({4, 1, 1})), InvariantError);
  EXPECT_THROW(s.validate(), InvariantError);
}
