#pragma once

// Dense Fock-space reference for small tetrons. Majoranas act on state vectors
// through the Jordan-Wigner string; 2n modes, chain 1 first.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tetron/codes.hpp"
#include "tetron/common.hpp"
#include "tetron/gaussian.hpp"
#include "tetron/noise.hpp"

namespace tetron {

inline constexpr int kOracleMaxSites = 5;
// State-vector operations only; no dense matrices are built.
inline constexpr int kDenseTetronMaxSites = 6;

/// Site Majorana a (0-based over 4n) acting on a state of 2n modes. Mode m = a / 2;
/// c_{2j-1} = a + a^dag and c_{2j} = i (a^dag - a).
inline CVector apply_majorana(int a, const CVector& psi) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  const int m = a / 2;
  const bool even = (a % 2) == 1;
  const std::uint64_t bit = std::uint64_t{1} << m;
  const std::uint64_t below = bit - 1;
  CVector out(psi.size());
  for (std::uint64_t x = 0; x < dim; ++x) {
    const double sign = (std::popcount(x & below) % 2) ? -1.0 : 1.0;
    cplx f = sign;
    if (even) f *= (x & bit) ? -kI : kI;
    out(static_cast<Eigen::Index>(x ^ bit)) = f * psi(static_cast<Eigen::Index>(x));
  }
  return out;
}

/// Dense matrices of the 4n site Majoranas (two chains of n sites).
using DenseMajoranaSet = std::vector<CMatrix>;

inline DenseMajoranaSet build_majoranas(int n) {
  if (n < 1 || n > kOracleMaxSites)
    throw std::invalid_argument("build_majoranas: n must lie in 1.." + std::to_string(kOracleMaxSites));
  const Eigen::Index dim = Eigen::Index{1} << (2 * n);
  DenseMajoranaSet out;
  for (int a = 0; a < 4 * n; ++a) {
    CMatrix c(dim, dim);
    for (Eigen::Index x = 0; x < dim; ++x) c.col(x) = apply_majorana(a, CVector::Unit(dim, x));
    out.push_back(std::move(c));
  }
  return out;
}

using DenseState = CVector;

struct DenseExpectations {
  double ps = 0.0;
  double znum = 0.0;
};

/// Dense operators in the c' basis of a tetron: c'_k = sum_a O_{ka} c_a.
class DenseTetron {
 public:
  explicit DenseTetron(BasisChange basis) : basis_(std::move(basis)) {
    if (basis_.n < 1 || basis_.n > kDenseTetronMaxSites)
      throw std::invalid_argument("DenseTetron: n must lie in 1.." + std::to_string(kDenseTetronMaxSites));
  }

  int n() const { return basis_.n; }
  Eigen::Index dim() const { return Eigen::Index{1} << (2 * basis_.n); }
  const BasisChange& basis() const { return basis_; }

  CVector cprime(int k, const CVector& psi) const {
    CVector out = CVector::Zero(psi.size());
    for (int a = 0; a < 4 * n(); ++a) {
      const double c = basis_.O(k, a);
      if (c != 0.0) out += c * apply_majorana(a, psi);
    }
    return out;
  }

  /// -i c'_a c'_b.
  CVector bilinear(int a, int b, const CVector& psi) const { return -kI * cprime(a, cprime(b, psi)); }

  /// (1 + Q) / 2 for Q = -i c'_a c'_b.
  CVector half_projector(int a, int b, const CVector& psi) const { return 0.5 * (psi + bilinear(a, b, psi)); }

  /// E(J1, J2) = prod i c_{2j-1} c_{2j}, applied in the site basis.
  CVector apply_error(const ErrorSample& s, const CVector& psi) const {
    s.validate();
    CVector out = psi;
    for (int p = 1; p <= 2; ++p)
      for (int j : s.chain(p)) {
        const int base = (p - 1) * 2 * n() + 2 * (j - 1);
        out = kI * apply_majorana(base, apply_majorana(base + 1, out));
      }
    return out;
  }

  CVector apply_stabilizer(const StabilizerSet& stab, std::size_t s, const CVector& psi) const {
    const auto& sup = stab.support[s];
    if (stab.labels[s].parity) return bilinear(sup[0], sup[1], bilinear(sup[2], sup[3], psi));
    return bilinear(sup[0], sup[1], psi);
  }

  CVector project_code(const StabilizerSet& stab, const CVector& psi) const {
    CVector out = psi;
    for (std::size_t s = 0; s < stab.labels.size(); ++s) out = 0.5 * (out + apply_stabilizer(stab, s, out));
    return out;
  }

  /// Logical |0>: all WQPs empty, -i gamma_1 gamma_2 = -i gamma_3 gamma_4 = +1.
  DenseState logical_zero_state(std::uint64_t seed = 7, const Tolerances& tol = default_tolerances()) const {
    auto project = [&](CVector v) {
      const int nn = n();
      for (int p = 1; p <= 2; ++p) {
        for (int l = 1; l < nn; ++l) v = half_projector(cprime_index(nn, p, 2 * l), cprime_index(nn, p, 2 * l + 1), v);
        v = half_projector(cprime_index(nn, p, 1), cprime_index(nn, p, 2 * nn), v);
      }
      return v;
    };
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    auto random_state = [&] {
      CVector v(dim());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(gen), g(gen));
      return v;
    };
    CVector a = project(random_state());
    CVector b = project(random_state());
    if (a.norm() < 1e-6 || b.norm() < 1e-6) throw InvariantError("logical_zero_state: joint eigenspace is empty");
    a.normalize();
    b.normalize();
    if (std::abs(std::abs(a.dot(b)) - 1.0) > tol.purity)
      throw InvariantError("logical_zero_state: joint eigenspace is not one-dimensional");
    return a;
  }

  /// M_{kl} = -(i/2) <[c'_k, c'_l]>, in the c' basis.
  RMatrix covariance(const DenseState& psi, const Tolerances& tol = default_tolerances()) const {
    const int m = 4 * n();
    std::vector<CVector> cp;
    for (int k = 0; k < m; ++k) cp.push_back(cprime(k, psi));
    RMatrix out = RMatrix::Zero(m, m);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        if (k == l) continue;
        const cplx ckl = cp[static_cast<std::size_t>(k)].dot(cp[static_cast<std::size_t>(l)]);  // <c_k c_l>
        const cplx v = -kI * ckl;
        if (std::abs(v.imag()) > tol.purity) throw InvariantError("covariance: complex entry");
        out(k, l) = v.real();
      }
    return out;
  }

  DenseExpectations expectations(const DenseState& psi, const StabilizerSet& stab) const {
    const CVector proj = project_code(stab, psi);
    const auto mzm = stab.mzm_indices();
    DenseExpectations e;
    e.ps = psi.dot(proj).real();
    e.znum = proj.dot(bilinear(mzm[0], mzm[1], proj)).real();
    return e;
  }

 private:
  BasisChange basis_;
};

/// Exhaustive dense channel average, lexicographic over (J1, J2) masks.
inline RateEstimate exact_rates(const DenseTetron& dense, const StabilizerSet& stab, double q) {
  NoiseModel{q}.validate();
  const int n = dense.n();
  if (n > 4) throw std::invalid_argument("exact_rates: exhaustive mode requires n <= 4");
  const DenseState zero = dense.logical_zero_state();
  const std::uint64_t per_chain = std::uint64_t{1} << n;
  std::vector<double> wps, wzn;
  for (std::uint64_t m1 = 0; m1 < per_chain; ++m1)
    for (std::uint64_t m2 = 0; m2 < per_chain; ++m2) {
      const ErrorSample s = ErrorSample::from_masks(n, m1, m2);
      const double prob = sample_probability(s, q, n);
      if (prob == 0.0) {
        wps.push_back(0.0);
        wzn.push_back(0.0);
        continue;
      }
      const auto e = dense.expectations(dense.apply_error(s, zero), stab);
      wps.push_back(prob * e.ps);
      wzn.push_back(prob * e.znum);
    }
  RateEstimate r;
  r.exhaustive = true;
  r.mean_ps = pairwise_sum(wps);
  r.p_loss = std::clamp(1.0 - r.mean_ps, 0.0, 1.0);
  if (r.mean_ps <= 0.0) throw InsufficientStatistics("exact_rates: <P_S> vanishes");
  r.p_bitflip = std::clamp((1.0 - pairwise_sum(wzn) / r.mean_ps) / 2.0, 0.0, 1.0);
  return r;
}

inline RateEstimate exact_rates(const TetronModel& model, double q) {
  return exact_rates(DenseTetron(model.evaluator().basis()), model.evaluator().stabilizers(), q);
}

}  // namespace tetron
