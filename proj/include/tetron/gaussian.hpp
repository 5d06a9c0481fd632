#pragma once

// Fermionic-Gaussian engine in the c' basis: covariance states, error
// conjugation and Pfaffian evaluation of stabilizer-projector expectations.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tetron/codes.hpp"
#include "tetron/common.hpp"
#include "tetron/pfaffian.hpp"
#include "tetron/wannier.hpp"

namespace tetron {

/// Real antisymmetric 4n x 4n covariance matrix, c' ordering (chain 1 then chain 2).
struct CovarianceState {
  int n = 0;
  RMatrix M;

  double antisymmetry_residual() const { return max_abs(RMatrix(M + M.transpose())); }
  double purity_residual() const {
    return max_abs(RMatrix(M * M.transpose() - RMatrix::Identity(M.rows(), M.cols())));
  }

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (M.rows() != 4 * n || M.cols() != 4 * n) throw std::invalid_argument("CovarianceState: M must be 4n x 4n");
    if (antisymmetry_residual() > tol.hermitian) throw InvariantError("CovarianceState: M is not antisymmetric");
    if (purity_residual() > tol.purity) throw InvariantError("CovarianceState: M M^T != 1 (state not pure)");
  }
};

/// Direct sum of the two per-chain Wannier O matrices: c' = O c.
struct BasisChange {
  int n = 0;
  RMatrix O;

  static BasisChange identity(int n) { return {n, RMatrix::Identity(4 * n, 4 * n)}; }

  static BasisChange from_chains(const WannierBasis& chain1, const WannierBasis& chain2,
                                 const Tolerances& tol = default_tolerances()) {
    if (chain1.n != chain2.n) throw std::invalid_argument("BasisChange: chains must have equal length");
    const int n = chain1.n;
    BasisChange b{n, RMatrix::Zero(4 * n, 4 * n)};
    b.O.topLeftCorner(2 * n, 2 * n) = chain1.O;
    b.O.bottomRightCorner(2 * n, 2 * n) = chain2.O;
    b.validate(tol);
    return b;
  }

  void validate(const Tolerances& tol = default_tolerances()) const {
    if (O.rows() != 4 * n || O.cols() != 4 * n) throw std::invalid_argument("BasisChange: O must be 4n x 4n");
    if (max_abs(RMatrix(O * O.transpose() - RMatrix::Identity(4 * n, 4 * n))) > tol.orthogonality)
      throw InvariantError("BasisChange: O is not orthogonal");
  }
};

/// Logical |0> (zeta = 0) or |1> (zeta = 1): per chain M_{2l,2l+1} = 1 for
/// l = 1..n-1 and M_{1,2n} = (-1)^zeta, 1-based within the chain.
inline CovarianceState initial_covariance(int n, int zeta = 0) {
  if (n < 2) throw std::invalid_argument("initial_covariance: n must be >= 2");
  CovarianceState s{n, RMatrix::Zero(4 * n, 4 * n)};
  for (int p = 0; p < 2; ++p) {
    const int off = 2 * n * p;
    for (int l = 1; l < n; ++l) {
      s.M(off + 2 * l - 1, off + 2 * l) = 1.0;
      s.M(off + 2 * l, off + 2 * l - 1) = -1.0;
    }
    const double z = (zeta % 2 == 0) ? 1.0 : -1.0;
    s.M(off, off + 2 * n - 1) = z;
    s.M(off + 2 * n - 1, off) = -z;
  }
  return s;
}

/// Site-basis signs of E(J_1, J_2): each i c_{2j-1} c_{2j} flips both Majoranas of site j.
inline RVector error_signs(const ErrorSample& sample) {
  sample.validate();
  RVector s = RVector::Ones(4 * sample.n);
  for (int p = 1; p <= 2; ++p)
    for (int j : sample.chain(p)) {
      const int base = (p - 1) * 2 * sample.n + 2 * (j - 1);
      s(base) = -1.0;
      s(base + 1) = -1.0;
    }
  return s;
}

/// R with E^dag c'_a E = sum_b R_ab c'_b, i.e. O S O^T where S is the site-basis
/// signed permutation of the error. The covariance of E|psi> is R M R^T.
inline RMatrix error_rotation(const ErrorSample& sample, const BasisChange& basis) {
  if (sample.n != basis.n) throw std::out_of_range("error_rotation: sample and basis sizes differ");
  const RVector s = error_signs(sample);
  return basis.O * s.asDiagonal() * basis.O.transpose();
}

inline CovarianceState apply_error(const CovarianceState& state, const ErrorSample& sample,
                                   const BasisChange& basis) {
  const RMatrix r = error_rotation(sample, basis);
  return {state.n, r * state.M * r.transpose()};
}

/// Linear Majorana operator L = sum_k coeff_k c'_{index_k}.
struct LinearOp {
  std::vector<std::pair<int, cplx>> terms;

  static LinearOp single(int a, cplx c = 1.0) { return {{{a, c}}}; }

  static LinearOp from_dense(const CVector& v) {
    LinearOp op;
    for (Eigen::Index a = 0; a < v.size(); ++a)
      if (v(a) != cplx(0.0)) op.terms.emplace_back(static_cast<int>(a), v(a));
    return op;
  }
};

struct MomentMatrix {
  CMatrix A;
  int m() const { return static_cast<int>(A.rows() / 2); }
};

/// A_{jj'} = v_j^T (1 + iM) v_{j'} for j < j', antisymmetric completion.
inline MomentMatrix second_moments(const RMatrix& M, const std::vector<LinearOp>& ops) {
  if (ops.size() % 2 != 0) throw std::invalid_argument("second_moments: operator count must be even");
  const auto k = static_cast<Eigen::Index>(ops.size());
  MomentMatrix out{CMatrix::Zero(k, k)};
  for (Eigen::Index x = 0; x < k; ++x)
    for (Eigen::Index y = x + 1; y < k; ++y) {
      cplx acc = 0.0;
      for (const auto& [a, ca] : ops[static_cast<std::size_t>(x)].terms)
        for (const auto& [b, cb] : ops[static_cast<std::size_t>(y)].terms)
          acc += ca * cb * (a == b ? cplx(1.0) : kI * M(a, b));
      out.A(x, y) = acc;
      out.A(y, x) = -acc;
    }
  return out;
}

inline MomentMatrix second_moments(const CovarianceState& state, const std::vector<CVector>& ops) {
  std::vector<LinearOp> sparse;
  sparse.reserve(ops.size());
  for (const auto& v : ops) {
    if (v.size() != state.M.rows()) throw std::invalid_argument("second_moments: coefficient vector has wrong size");
    sparse.push_back(LinearOp::from_dense(v));
  }
  return second_moments(state.M, sparse);
}

inline cplx pfaffian(const MomentMatrix& a) { return pfaffian<cplx>(a.A); }

struct StabilizerExpectations {
  double ps = 0.0;    // <P_S>
  double znum = 0.0;  // <P_S (-i gamma_1 gamma_2) P_S>
};

namespace detail {

inline double clamp_unit(double x, double tol, const char* what) {
  if (x < -tol || x > 1.0 + tol)
    throw InvariantError(std::string(what) + " = " + std::to_string(x) + " outside [0, 1]");
  return std::clamp(x, 0.0, 1.0);
}

inline double real_part(cplx z, double scale, const char* what) {
  if (std::abs(z.imag()) > 1e-8 * std::max(1.0, scale))
    throw InvariantError(std::string(what) + " has imaginary part " + std::to_string(z.imag()));
  return z.real();
}

}  // namespace detail

/// Evaluates <P_S> and the Z-bar numerator on a covariance matrix given in the
/// coordinates `index` (index[k] is the c' label of row k of M). Only the
/// c' labels in the stabilizer supports are ever read.
inline StabilizerExpectations stabilizer_expectations(const RMatrix& M, const std::vector<int>& index,
                                                      const StabilizerSet& stab,
                                                      const Tolerances& tol = default_tolerances()) {
  auto pos = [&](int label) {
    const auto it = std::lower_bound(index.begin(), index.end(), label);
    if (it == index.end() || *it != label) throw std::out_of_range("stabilizer_expectations: label not available");
    return static_cast<int>(it - index.begin());
  };
  // P_{p,l} = c'_{2l} (c'_{2l} - i c'_{2l+1}) / 2, ascending (p, l).
  std::vector<LinearOp> ops;
  for (std::size_t s = 0; s < stab.labels.size(); ++s) {
    if (stab.labels[s].parity) continue;
    const int a = pos(stab.support[s][0]);
    const int b = pos(stab.support[s][1]);
    ops.push_back(LinearOp::single(a));
    ops.push_back({{{a, 0.5}, {b, -0.5 * kI}}});
  }
  const std::vector<int> mzm = stab.mzm_indices();
  const int g1 = pos(mzm[0]), g2 = pos(mzm[1]), g3 = pos(mzm[2]), g4 = pos(mzm[3]);

  auto with = [&](std::initializer_list<int> extra) {
    std::vector<LinearOp> all = ops;
    for (int e : extra) all.push_back(LinearOp::single(e));
    return pfaffian(second_moments(M, all));
  };

  const cplx p_qp = ops.empty() ? cplx(1.0) : pfaffian(second_moments(M, ops));
  const cplx p_qp_g1234 = with({g1, g2, g3, g4});
  const cplx p_qp_g12 = with({g1, g2});
  const cplx p_qp_g34 = with({g3, g4});

  // P_parity = (1 - g1 g2 g3 g4) / 2 and P_parity Z P_parity = (-i g1 g2 - i g3 g4) / 2.
  const cplx ps = 0.5 * (p_qp - p_qp_g1234);
  const cplx zn = 0.5 * (-kI * p_qp_g12 - kI * p_qp_g34);
  StabilizerExpectations out;
  out.ps = detail::clamp_unit(detail::real_part(ps, 1.0, "<P_S>"), tol.clamp, "<P_S>");
  out.znum = detail::real_part(zn, 1.0, "Znum");
  if (std::abs(out.znum) > out.ps + tol.clamp)
    throw InvariantError("Znum = " + std::to_string(out.znum) + " exceeds <P_S> = " + std::to_string(out.ps));
  return out;
}

namespace detail {
inline std::vector<int> iota_index(Eigen::Index k) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}
}  // namespace detail

inline double expectation_PS(const CovarianceState& state, const StabilizerSet& stab,
                             const Tolerances& tol = default_tolerances()) {
  return stabilizer_expectations(state.M, detail::iota_index(state.M.rows()), stab, tol).ps;
}

inline double expectation_Znum(const CovarianceState& state, const StabilizerSet& stab,
                               const Tolerances& tol = default_tolerances()) {
  return stabilizer_expectations(state.M, detail::iota_index(state.M.rows()), stab, tol).znum;
}

/// Per-sample evaluator used by the Monte Carlo loop. Keeps the site-basis
/// covariance N0 = O^T M0 O and only forms the rows of R M0 R^T that the
/// stabilizers touch: M'_K = O_K S N0 S O_K^T.
class GaussianEvaluator {
 public:
  GaussianEvaluator(BasisChange basis, StabilizerSet stab, const CovarianceState& initial)
      : basis_(std::move(basis)), stab_(std::move(stab)) {
    if (initial.n != basis_.n || stab_.n != basis_.n)
      throw std::invalid_argument("GaussianEvaluator: inconsistent sizes");
    n0_ = basis_.O.transpose() * initial.M * basis_.O;
    for (const auto& sup : stab_.support) index_.insert(index_.end(), sup.begin(), sup.end());
    std::sort(index_.begin(), index_.end());
    index_.erase(std::unique(index_.begin(), index_.end()), index_.end());
    ok_.resize(static_cast<Eigen::Index>(index_.size()), 4 * basis_.n);
    for (std::size_t k = 0; k < index_.size(); ++k) ok_.row(static_cast<Eigen::Index>(k)) = basis_.O.row(index_[k]);
  }

  int n() const { return basis_.n; }
  const StabilizerSet& stabilizers() const { return stab_; }
  const BasisChange& basis() const { return basis_; }

  StabilizerExpectations evaluate(const ErrorSample& sample, const Tolerances& tol = default_tolerances()) const {
    const RVector s = error_signs(sample);
    const RMatrix oks = ok_ * s.asDiagonal();
    const RMatrix mk = oks * n0_ * oks.transpose();
    return stabilizer_expectations(mk, index_, stab_, tol);
  }

 private:
  BasisChange basis_;
  StabilizerSet stab_;
  RMatrix n0_;
  std::vector<int> index_;
  RMatrix ok_;
};

}  // namespace tetron
