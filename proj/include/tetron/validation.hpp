#pragma once

// Oracle cross-checks shared by the `validate` subcommand and the tests.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tetron/analytic.hpp"
#include "tetron/gaussian.hpp"
#include "tetron/noise.hpp"
#include "tetron/oracle.hpp"
#include "tetron/pfaffian.hpp"

namespace tetron {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // observed discrepancy
  double tolerance = 0.0;  // pass iff value <= tolerance
  std::string detail;
};

namespace detail {

inline TetronModel random_model(std::mt19937_64& gen, int n, int d) {
  std::uniform_real_distribution<double> mu(0.0, 0.9), del(0.1, 1.0);
  return TetronModel(ChainParams{mu(gen), 1.0, del(gen), n, {}, 1}, ChainParams{mu(gen), 1.0, del(gen), n, {}, 2},
                     CodeSpec{n, d, 1});
}

inline RMatrix random_antisymmetric(std::mt19937_64& gen, int m) {
  std::normal_distribution<double> g;
  RMatrix a = RMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      a(i, j) = g(gen);
      a(j, i) = -a(i, j);
    }
  return a;
}

}  // namespace detail

/// Worst |<P_S>_dense - <P_S>_gauss| and |Znum_dense - Znum_gauss| over `pairs`
/// random (parameter, error sample) draws at n sites per chain.
struct EquivalenceResult {
  double ps = 0.0;
  double znum = 0.0;
  double covariance = 0.0;
};

inline EquivalenceResult gaussian_dense_equivalence(int n, int pairs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uq(0.05, 0.6);
  EquivalenceResult out;
  for (int t = 0; t < pairs; ++t) {
    const int d = t % ((n + 1) / 2);
    const TetronModel model = detail::random_model(gen, n, d);
    const DenseTetron dense(model.evaluator().basis());
    const DenseState zero = dense.logical_zero_state(seed + static_cast<std::uint64_t>(t));
    const ErrorSample s = sample_error(gen, uq(gen), n);
    const DenseState psi = dense.apply_error(s, zero);
    const auto de = dense.expectations(psi, model.evaluator().stabilizers());
    const auto ge = model.evaluator().evaluate(s);
    const CovarianceState cov = apply_error(initial_covariance(n), s, model.evaluator().basis());
    out.ps = std::max(out.ps, std::abs(de.ps - ge.ps));
    out.znum = std::max(out.znum, std::abs(de.znum - ge.znum));
    out.covariance = std::max(out.covariance, max_abs(RMatrix(dense.covariance(psi) - cov.M)));
  }
  return out;
}

inline std::vector<CheckResult> run_oracle_suite(std::uint64_t seed = 2024) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double tol, std::string detail = {}) {
    out.push_back({std::move(name), value <= tol, value, tol, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out.push_back({name, false, std::nan(""), 0.0, e.what()});
    }
  };
  std::mt19937_64 gen(seed);

  guarded("majorana anticommutators (n=2)", [&] {
    const auto c = build_majoranas(2);
    double worst = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c.size(); ++b) {
        const CMatrix ac = c[a] * c[b] + c[b] * c[a];
        const CMatrix ref = (a == b ? 2.0 : 0.0) * CMatrix::Identity(ac.rows(), ac.cols());
        worst = std::max(worst, max_abs(CMatrix(ac - ref)));
      }
    add("majorana anticommutators (n=2)", worst, 1e-12);
  });

  guarded("logical |0> covariance (fixed point n=2)", [&] {
    const TetronModel m = TetronModel::fixed_point(2, 0);
    const DenseTetron dense(m.evaluator().basis());
    add("logical |0> covariance (fixed point n=2)",
        max_abs(RMatrix(dense.covariance(dense.logical_zero_state()) - initial_covariance(2).M)), 1e-10);
  });

  guarded("logical |0> covariance (mu=0.3, Delta=0.4, n=4)", [&] {
    const TetronModel m(ChainParams{0.3, 1.0, 0.4, 4, {}, 1}, ChainParams{0.3, 1.0, 0.4, 4, {}, 2}, CodeSpec{4, 1, 1});
    const DenseTetron dense(m.evaluator().basis());
    add("logical |0> covariance (mu=0.3, Delta=0.4, n=4)",
        max_abs(RMatrix(dense.covariance(dense.logical_zero_state()) - initial_covariance(4).M)), 1e-10);
  });

  guarded("WQP parity equals -i c_2l c_2l+1 (fixed point n=3)", [&] {
    const int n = 3;
    const DenseTetron dense(BasisChange::identity(n));
    std::normal_distribution<double> g;
    CVector psi(dense.dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(g(gen), g(gen));
    double worst = 0.0;
    for (int p = 1; p <= 2; ++p)
      for (int l = 1; l < n; ++l) {
        const int a = cprime_index(n, p, 2 * l), b = cprime_index(n, p, 2 * l + 1);
        // phi = (c_{2l} + i c_{2l+1}) / 2; (-1)^{phi^dag phi} = 1 - 2 phi^dag phi.
        auto phi = [&](const CVector& v) { CVector r = 0.5 * (dense.cprime(a, v) + kI * dense.cprime(b, v)); return r; };
        auto phid = [&](const CVector& v) { CVector r = 0.5 * (dense.cprime(a, v) - kI * dense.cprime(b, v)); return r; };
        const CVector parity = psi - 2.0 * phid(phi(psi));
        worst = std::max(worst, max_abs(CVector(parity - dense.bilinear(a, b, psi))));
      }
    add("WQP parity equals -i c_2l c_2l+1 (fixed point n=3)", worst, 1e-10);
  });

  guarded("parity-projected Z carries a factor 1/2", [&] {
    const int n = 2;
    const DenseTetron dense(BasisChange::identity(n));
    std::normal_distribution<double> g;
    CVector psi(dense.dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(g(gen), g(gen));
    const int g1 = cprime_index(n, 1, 1), g2 = cprime_index(n, 1, 2 * n), g3 = cprime_index(n, 2, 1),
              g4 = cprime_index(n, 2, 2 * n);
    auto par = [&](const CVector& v) { CVector r = 0.5 * (v + dense.bilinear(g1, g2, dense.bilinear(g3, g4, v))); return r; };
    const CVector lhs = par(dense.bilinear(g1, g2, par(psi)));
    const CVector rhs = 0.5 * par(CVector(dense.bilinear(g1, g2, psi) + dense.bilinear(g3, g4, psi)));
    add("parity-projected Z carries a factor 1/2", max_abs(CVector(lhs - rhs)), 1e-10);
  });

  guarded("Gaussian vs dense: covariance, <P_S>, Znum (n=4, 25 pairs)", [&] {
    const auto r = gaussian_dense_equivalence(4, 25, seed);
    add("error conjugation: covariance of E|0> = R M R^T (n=4)", r.covariance, 1e-10);
    add("Gaussian vs dense <P_S> (n=4)", r.ps, 1e-8);
    add("Gaussian vs dense Znum (n=4)", r.znum, 1e-8);
  });

  guarded("dense exact rates vs closed form (fixed point n=4, d=1, q=0.1)", [&] {
    const auto r = exact_rates(TetronModel::fixed_point(4, 1), 0.1);
    add("dense exact rates vs closed form (fixed point n=4, d=1, q=0.1)",
        std::max(std::abs(r.p_loss - p_loss_fixed(1, 0.1)), std::abs(r.p_bitflip - p_bitflip_fixed(1, 0.1))), 1e-10);
  });

  guarded("dense exact rates vs Gaussian exhaustive (mu=0.3, Delta=0.4, n=4)", [&] {
    const TetronModel m(ChainParams{0.3, 1.0, 0.4, 4, {}, 1}, ChainParams{0.3, 1.0, 0.4, 4, {}, 2}, CodeSpec{4, 1, 1});
    const auto a = exact_rates(m, 0.1);
    const auto b = estimate_rates_exhaustive(m, 0.1, 1);
    add("dense exact rates vs Gaussian exhaustive (mu=0.3, Delta=0.4, n=4)",
        std::max(std::abs(a.p_loss - b.p_loss), std::abs(a.p_bitflip - b.p_bitflip)), 1e-10);
  });

  guarded("Pfaffian squared equals determinant (up to 20x20)", [&] {
    double worst = 0.0;
    for (int m = 2; m <= 20; m += 2) {
      const RMatrix a = detail::random_antisymmetric(gen, m);
      const double pf = pfaffian<double>(a);
      const double det = a.partialPivLu().determinant();
      worst = std::max(worst, std::abs(pf * pf - det) / std::max(1e-300, std::abs(det)));
    }
    add("Pfaffian squared equals determinant (up to 20x20)", worst, 1e-8);
  });
  return out;
}

}  // namespace tetron
