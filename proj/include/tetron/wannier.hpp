#pragma once

// Quasiparticle projector, quasiparticle position operator and the Wannier
// quasiparticle (WQP) basis of one Kitaev chain.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tetron/bdg.hpp"

namespace tetron {

struct QPProjector {
  int n = 0;
  CMatrix P;                  // sum_{k>=1} |e_k><e_k|
  CMatrix range_basis;        // 2n x (n-1), columns e_1..e_{n-1}
  int excluded_mode_index = 0;

  CMatrix conjugate() const { return ph_conjugate(P); }
};

struct PositionOperator {
  int n = 0;
  CMatrix X;
  QPProjector source;
};

struct WannierBasis {
  int n = 0;
  RVector centers;         // x_1 < ... < x_{n-1}
  CMatrix phi;             // column l-1 is |phi_l> (creation operator), particle/hole basis
  RMatrix O;               // rows: gamma_L, (c'_{2l}, c'_{2l+1}) pairs, gamma_R in site Majoranas
  std::vector<int> interval_label;  // round(x_l - 1/2); equals l at the fixed point
  std::vector<bool> center_tie;     // x_{l+1} - x_l below the tie tolerance
  bool has_ties() const {
    for (bool t : center_tie)
      if (t) return true;
    return false;
  }
  bool labels_match_index() const {
    for (std::size_t l = 0; l < interval_label.size(); ++l)
      if (interval_label[l] != static_cast<int>(l) + 1) return false;
    return true;
  }
};

struct LocalizationFit {
  double prefactor = 0.0;
  double kappa = 0.0;
  double fit_quality = 0.0;  // coefficient of determination
  int points = 0;

  bool reliable() const { return fit_quality >= 0.9; }
  std::optional<double> rate() const { return reliable() ? std::optional<double>(kappa) : std::nullopt; }
};

inline QPProjector build_pqp(const QuasiparticleSpectrum& spec, const Tolerances& tol = default_tolerances()) {
  if (spec.n < 2) throw std::invalid_argument("build_pqp: spectrum needs at least 2 modes");
  const int n = spec.n;
  QPProjector out;
  out.n = n;
  out.range_basis = spec.modes.rightCols(n - 1);
  out.P = out.range_basis * out.range_basis.adjoint();
  if (max_abs(CMatrix(out.P * out.P - out.P)) > tol.projector)
    throw InvariantError("build_pqp: P_qp is not idempotent");
  if (std::abs(out.P.trace().real() - (n - 1)) > tol.projector)
    throw InvariantError("build_pqp: rank of P_qp differs from n-1");
  if (max_abs(CMatrix(out.P * out.conjugate())) > tol.projector)
    throw InvariantError("build_pqp: P_qp and its PH image are not orthogonal");
  return out;
}

/// Diagonal position operator sum_j j (|j,1><j,1| + |j,2><j,2|).
inline CMatrix site_position(int n) {
  CMatrix x = CMatrix::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    x(j, j) = j + 1;
    x(n + j, n + j) = j + 1;
  }
  return x;
}

inline PositionOperator build_xqp(const QPProjector& p, const Tolerances& tol = default_tolerances()) {
  const CMatrix xt = site_position(p.n);
  const CMatrix pbar = p.conjugate();
  PositionOperator out{p.n, p.P * xt * p.P - pbar * xt * pbar, p};
  const double scale = static_cast<double>(p.n);
  if (hermiticity_residual(out.X) > tol.projector * scale)
    throw InvariantError("build_xqp: X_qp is not Hermitian");
  if (particle_hole_residual(out.X) > tol.projector * scale)
    throw InvariantError("build_xqp: X_qp violates the particle-hole constraint");
  const CMatrix nqp = p.P - pbar;
  if (max_abs(CMatrix(out.X * nqp - nqp * out.X)) > tol.projector * scale)
    throw InvariantError("build_xqp: X_qp does not commute with N_qp");
  return out;
}

namespace detail {

// Sign convention: the largest-magnitude entry (first one on ties) is positive.
inline double sign_of_largest(const RVector& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return v(idx) < 0.0 ? -1.0 : 1.0;
}

}  // namespace detail

/// Real Majorana vectors (gamma_L, gamma_R) spanning the MZM mode and its PH image.
/// gamma_L carries the larger left-half weight; each is signed so that its
/// largest-magnitude coefficient is positive.
inline std::pair<RVector, RVector> fix_mzm_pair(const QuasiparticleSpectrum& spec,
                                                const Tolerances& tol = default_tolerances()) {
  const int n = spec.n;
  const CVector beta = to_majorana_basis(CVector(spec.modes.col(0)));
  if (std::abs(beta.cwiseProduct(beta).sum()) > tol.mzm_closure)
    throw InvariantError("fix_mzm_pair: zero-mode subspace is not particle-hole closed");
  RMatrix basis(2 * n, 2);
  basis.col(0) = std::sqrt(2.0) * beta.real();
  basis.col(1) = std::sqrt(2.0) * beta.imag();
  // Left half of the Majorana index range.
  const RMatrix left = basis.topRows(n);
  const Eigen::Matrix2d weight = left.transpose() * left;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(weight);
  RVector gl = basis * es.eigenvectors().col(1);
  RVector gr = basis * es.eigenvectors().col(0);
  gl *= detail::sign_of_largest(gl);
  gr *= detail::sign_of_largest(gr);
  return {gl, gr};
}

/// Diagonalizes X_qp on range(P_qp) and assembles the orthogonal c' basis.
///
/// The phase of each |phi_l> is fixed so that c'_{2l} = phi^dag + phi carries
/// maximal weight on the even site Majoranas c_{2j}, with its largest coefficient
/// positive; c'_{2l+1} = i (phi^dag - phi) follows.
inline WannierBasis wannier_basis(const PositionOperator& x, const QuasiparticleSpectrum& spec,
                                  const Tolerances& tol = default_tolerances()) {
  const int n = x.n;
  const CMatrix& e = x.source.range_basis;
  const CMatrix restricted = e.adjoint() * x.X * e;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (restricted + restricted.adjoint())));
  if (es.info() != Eigen::Success) throw InvariantError("wannier_basis: eigensolver failed");

  WannierBasis out;
  out.n = n;
  out.centers = es.eigenvalues();
  out.phi = e * es.eigenvectors();
  out.O = RMatrix::Zero(2 * n, 2 * n);

  const double s2 = std::sqrt(2.0);
  for (int l = 1; l < n; ++l) {
    CVector beta = to_majorana_basis(CVector(out.phi.col(l - 1)));
    const RVector a = beta.real();
    const RVector b = beta.imag();
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    for (int j = 0; j < n; ++j) {  // even site Majoranas c_{2j} sit at 0-based 2j-1
      const double aj = a(2 * j + 1), bj = b(2 * j + 1);
      g(0, 0) += aj * aj;
      g(0, 1) += aj * bj;
      g(1, 1) += bj * bj;
    }
    g(1, 0) = g(0, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> gs(g);
    const double cos_t = gs.eigenvectors()(0, 1);
    const double sin_t = -gs.eigenvectors()(1, 1);
    beta *= cplx(cos_t, sin_t);
    if (detail::sign_of_largest(beta.real()) < 0.0) beta = -beta;
    out.phi.col(l - 1) = from_majorana_basis(beta);
    out.O.row(2 * l - 1) = s2 * beta.real().transpose();
    out.O.row(2 * l) = -s2 * beta.imag().transpose();
  }
  const auto [gl, gr] = fix_mzm_pair(spec, tol);
  out.O.row(0) = gl.transpose();
  out.O.row(2 * n - 1) = gr.transpose();

  if (max_abs(RMatrix(out.O * out.O.transpose() - RMatrix::Identity(2 * n, 2 * n))) > tol.orthogonality)
    throw InvariantError("wannier_basis: c' basis is not orthogonal");

  out.interval_label.resize(static_cast<std::size_t>(n - 1));
  out.center_tie.assign(static_cast<std::size_t>(n - 1), false);
  for (int l = 0; l < n - 1; ++l) {
    out.interval_label[static_cast<std::size_t>(l)] = static_cast<int>(std::lround(out.centers(l) - 0.5));
    if (l + 1 < n - 1 && out.centers(l + 1) - out.centers(l) < tol.center_tie) {
      out.center_tie[static_cast<std::size_t>(l)] = true;
      out.center_tie[static_cast<std::size_t>(l + 1)] = true;
    }
  }
  return out;
}

/// Convenience: spectrum -> P_qp -> X_qp -> Wannier basis.
inline WannierBasis wannier_basis(const QuasiparticleSpectrum& spec, const Tolerances& tol = default_tolerances()) {
  return wannier_basis(build_xqp(build_pqp(spec, tol), tol), spec, tol);
}

/// Per-site amplitude max_m |<j,m|psi>| of a particle/hole vector (site j at index j-1).
inline RVector site_amplitudes(const CVector& psi) {
  const Eigen::Index n = psi.size() / 2;
  RVector amp(n);
  for (Eigen::Index j = 0; j < n; ++j) amp(j) = std::max(std::abs(psi(j)), std::abs(psi(n + j)));
  return amp;
}

/// Per-site amplitude max_{m,m'} |<j0,m|P|j,m'>| of one row block of an operator.
inline RVector operator_row_amplitudes(const CMatrix& op, int row_site) {
  const Eigen::Index n = op.rows() / 2;
  RVector amp = RVector::Zero(n);
  const Eigen::Index r0 = row_site - 1;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index rm : {r0, n + r0})
      for (Eigen::Index cm : {j, n + j}) amp(j) = std::max(amp(j), std::abs(op(rm, cm)));
  return amp;
}

/// Least-squares fit of log(amplitude_j) = log C - kappa |j - center| over
/// sites 3..n-2 (1-based) with amplitude above 1e-12. Too few usable points
/// return a zero-quality fit instead of failing.
inline LocalizationFit localization_fit(const RVector& amplitude, double center, int edge_margin = 2) {
  if (amplitude.size() == 0 || amplitude.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("localization_fit: amplitude vector must be non-zero");
  const int n = static_cast<int>(amplitude.size());
  std::vector<double> t, y;
  for (int j = 1 + edge_margin; j <= n - edge_margin; ++j) {
    const double a = std::abs(amplitude(j - 1));
    if (a > 1e-12) {
      t.push_back(std::abs(j - center));
      y.push_back(std::log(a));
    }
  }
  LocalizationFit fit;
  fit.points = static_cast<int>(t.size());
  if (t.size() < 3) return fit;
  const double m = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
  }
  const double tm = st / m, ym = sy / m;
  double stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (stt <= 0.0) return fit;
  const double slope = sty / stt;
  fit.kappa = -slope;
  fit.prefactor = std::exp(ym - slope * tm);
  if (syy <= 0.0) {
    fit.fit_quality = 1.0;
    return fit;
  }
  double ssr = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (ym + slope * (t[i] - tm));
    ssr += r * r;
  }
  fit.fit_quality = 1.0 - ssr / syy;
  return fit;
}

}  // namespace tetron
