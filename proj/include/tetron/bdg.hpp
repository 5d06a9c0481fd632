#pragma once

// Kitaev-chain Bogoliubov-de Gennes construction and particle-hole symmetric
// diagonalization.
//
// Conventions used throughout the library:
//  * particle/hole basis of linear operators: index j-1 is |j,1> = a_j^dag,
//    index n+j-1 is |j,2> = a_j (sites j = 1..n);
//  * site Majoranas: a_j = (c_{2j-1} + i c_{2j}) / 2, stored 0-based so that
//    c_{2j-1} -> 2j-2 and c_{2j} -> 2j-1;
//  * a vector psi represents L = sum_a psi_a Phi^dag_a and the BdG matrix acts
//    as [H, L] <-> A psi.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tetron/common.hpp"

namespace tetron {

struct ChainParams {
  double mu = 0.0;
  double w = 1.0;
  double delta = 1.0;
  int n = 2;
  std::vector<double> disorder;  // per-site offsets added to mu; empty means all zero
  int chain_id = 1;

  static ChainParams fixed_point(int n, int chain_id = 1) { return {0.0, 1.0, 1.0, n, {}, chain_id}; }

  double site_mu(int j) const {  // j is 1-based
    return mu + (disorder.empty() ? 0.0 : disorder[static_cast<std::size_t>(j - 1)]);
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("ChainParams: n must be >= 2, got " + std::to_string(n));
    if (!(w > 0.0)) throw std::invalid_argument("ChainParams: hopping w must be > 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("ChainParams: pairing delta must be >= 0");
    if (!disorder.empty() && disorder.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("ChainParams: disorder length " + std::to_string(disorder.size()) +
                                  " does not match n = " + std::to_string(n));
    if (chain_id != 1 && chain_id != 2) throw std::invalid_argument("ChainParams: chain_id must be 1 or 2");
  }
};

/// Offsets drawn i.i.d. from Uniform[-amplitude, +amplitude]. Each chain gets its
/// own stream derived from (seed, realization, chain_id).
inline std::vector<double> draw_disorder(int n, double amplitude, std::uint64_t seed, int realization,
                                         int chain_id) {
  if (amplitude < 0.0) throw std::invalid_argument("disorder amplitude must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (amplitude == 0.0) return out;
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(chain_id), 0x5eedu};
  std::mt19937_64 gen(seq);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (auto& x : out) x = dist(gen);
  return out;
}

struct BdGMatrix {
  int n = 0;
  CMatrix A;  // 2n x 2n
  int dim() const { return 2 * n; }
};

/// tau_x K applied to a particle/hole vector: swaps the blocks and conjugates.
inline CVector ph_conjugate(const CVector& psi) {
  const Eigen::Index n = psi.size() / 2;
  CVector out(psi.size());
  out.head(n) = psi.tail(n).conjugate();
  out.tail(n) = psi.head(n).conjugate();
  return out;
}

/// tau_x K A K tau_x.
inline CMatrix ph_conjugate(const CMatrix& a) {
  const Eigen::Index n = a.rows() / 2;
  CMatrix out(a.rows(), a.cols());
  out.topLeftCorner(n, n) = a.bottomRightCorner(n, n).conjugate();
  out.topRightCorner(n, n) = a.bottomLeftCorner(n, n).conjugate();
  out.bottomLeftCorner(n, n) = a.topRightCorner(n, n).conjugate();
  out.bottomRightCorner(n, n) = a.topLeftCorner(n, n).conjugate();
  return out;
}

inline double hermiticity_residual(const CMatrix& a) { return max_abs(a - a.adjoint()); }
inline double particle_hole_residual(const CMatrix& a) { return max_abs(ph_conjugate(a) + a); }

inline BdGMatrix build_bdg(const ChainParams& p) {
  p.validate();
  const int n = p.n;
  CMatrix h = CMatrix::Zero(n, n);
  CMatrix pair = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) h(j, j) = -p.site_mu(j + 1);
  for (int j = 0; j + 1 < n; ++j) {
    h(j, j + 1) = -p.w;
    h(j + 1, j) = -p.w;
    // Delta a_j a_{j+1} + h.c. = (1/2) sum D_{ik} a_i^dag a_k^dag + h.c.
    pair(j, j + 1) = -p.delta;
    pair(j + 1, j) = p.delta;
  }
  BdGMatrix out{n, CMatrix(2 * n, 2 * n)};
  out.A.topLeftCorner(n, n) = h;
  out.A.topRightCorner(n, n) = pair;
  out.A.bottomLeftCorner(n, n) = -pair.conjugate();
  out.A.bottomRightCorner(n, n) = -h.conjugate();
  return out;
}

/// Columns are the normalized Majorana basis vectors |c_b / sqrt2> written in the
/// particle/hole basis: c_{2j-1} = a_j + a_j^dag and c_{2j} = i (a_j^dag - a_j).
inline CMatrix majorana_unitary(int n) {
  CMatrix u = CMatrix::Zero(2 * n, 2 * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    u(j, 2 * j) = s;
    u(n + j, 2 * j) = s;
    u(j, 2 * j + 1) = kI * s;
    u(n + j, 2 * j + 1) = -kI * s;
  }
  return u;
}

inline CVector to_majorana_basis(const CVector& psi) {
  if (psi.size() % 2 != 0 || psi.size() == 0)
    throw std::invalid_argument("to_majorana_basis: dimension must be even and non-zero");
  return majorana_unitary(static_cast<int>(psi.size() / 2)).adjoint() * psi;
}

inline CMatrix to_majorana_basis(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0)
    throw std::invalid_argument("to_majorana_basis: matrix must be square with even dimension");
  const CMatrix u = majorana_unitary(static_cast<int>(a.rows() / 2));
  return u.adjoint() * a * u;
}

inline CVector from_majorana_basis(const CVector& beta) {
  if (beta.size() % 2 != 0 || beta.size() == 0)
    throw std::invalid_argument("from_majorana_basis: dimension must be even and non-zero");
  return majorana_unitary(static_cast<int>(beta.size() / 2)) * beta;
}

inline CMatrix from_majorana_basis(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() % 2 != 0 || a.rows() == 0)
    throw std::invalid_argument("from_majorana_basis: matrix must be square with even dimension");
  const CMatrix u = majorana_unitary(static_cast<int>(a.rows() / 2));
  return u * a * u.adjoint();
}

struct QuasiparticleSpectrum {
  int n = 0;
  RVector energies;       // eps_0 <= eps_1 <= ... , all >= 0
  CMatrix modes;          // column k is |e_k>, particle/hole basis
  CMatrix hole_partners;  // column k is tau_x K |e_k>
  std::vector<std::string> warnings;

  double gap() const { return energies.size() > 1 ? energies(1) : 0.0; }
};

/// Diagonalizes a particle-hole symmetric BdG matrix and returns the
/// non-negative branch. The lowest mode (the MZM) is rebuilt from the
/// +/- eps_0 eigenspace so that it stays orthogonal to its own PH image even
/// when eps_0 is at machine precision.
inline QuasiparticleSpectrum diagonalize(const BdGMatrix& bdg, const Tolerances& tol = default_tolerances()) {
  const int n = bdg.n;
  if (bdg.A.rows() != 2 * n || bdg.A.cols() != 2 * n)
    throw std::invalid_argument("diagonalize: BdG matrix has wrong dimension");
  const double scale = std::max(1.0, max_abs(bdg.A));
  if (hermiticity_residual(bdg.A) > tol.hermitian * scale)
    throw InvariantError("diagonalize: BdG matrix is not Hermitian");
  if (particle_hole_residual(bdg.A) > tol.particle_hole * scale)
    throw InvariantError("diagonalize: BdG matrix violates the particle-hole constraint");

  Eigen::SelfAdjointEigenSolver<CMatrix> es(bdg.A);
  if (es.info() != Eigen::Success) throw InvariantError("diagonalize: eigensolver failed");
  const RVector& lam = es.eigenvalues();
  const CMatrix& vec = es.eigenvectors();

  QuasiparticleSpectrum out;
  out.n = n;
  out.energies.resize(n);
  out.modes.resize(2 * n, n);
  for (int k = 1; k < n; ++k) {
    out.energies(k) = lam(n + k);
    out.modes.col(k) = vec.col(n + k);
  }

  // Zero-mode pair: real orthonormal basis of span{v_{n-1}, v_n} in the Majorana basis.
  const CMatrix u = majorana_unitary(n);
  RMatrix real_span(2 * n, 4);
  for (int c = 0; c < 2; ++c) {
    const CVector beta = u.adjoint() * vec.col(n - 1 + c);
    real_span.col(2 * c) = beta.real();
    real_span.col(2 * c + 1) = beta.imag();
  }
  Eigen::JacobiSVD<RMatrix> svd(real_span, Eigen::ComputeThinU);
  const RVector sv = svd.singularValues();
  if (sv(2) > tol.mzm_closure * std::max(1.0, sv(0)))
    throw InvariantError("diagonalize: lowest eigenspace is not particle-hole closed");
  const RVector a = svd.matrixU().col(0);
  const RVector b = svd.matrixU().col(1);
  const RMatrix h = (u.adjoint() * bdg.A * u).imag();  // BdG in Majorana basis is i*h
  const double x = a.dot(h * b);
  const double s = 1.0 / std::sqrt(2.0);
  CVector beta0 = (x >= 0.0) ? CVector(s * (a.cast<cplx>() - kI * b.cast<cplx>()))
                             : CVector(s * (a.cast<cplx>() + kI * b.cast<cplx>()));
  out.energies(0) = std::abs(x);
  out.modes.col(0) = u * beta0;

  out.hole_partners.resize(2 * n, n);
  for (int k = 0; k < n; ++k) out.hole_partners.col(k) = ph_conjugate(CVector(out.modes.col(k)));

  for (int k = 0; k < n; ++k) {
    const CVector r = bdg.A * out.modes.col(k) - out.energies(k) * out.modes.col(k);
    if (r.cwiseAbs().maxCoeff() > tol.eigen_residual * scale)
      throw InvariantError("diagonalize: eigen-residual too large for mode " + std::to_string(k));
  }
  const CMatrix gram = out.modes.adjoint() * out.modes;
  if (max_abs(gram - CMatrix::Identity(n, n)) > tol.eigen_residual)
    throw InvariantError("diagonalize: modes are not orthonormal");
  if (max_abs(CMatrix(out.modes.adjoint() * out.hole_partners)) > tol.eigen_residual)
    throw InvariantError("diagonalize: positive branch is not orthogonal to its PH image");

  if (n > 1 && out.energies(0) > 0.1 * out.energies(1))
    out.warnings.push_back("eps_0 = " + std::to_string(out.energies(0)) + " exceeds 0.1 * eps_1 = " +
                           std::to_string(0.1 * out.energies(1)) + "; chain may not be topological");
  return out;
}

/// A = sum_k eps_k (|e_k><e_k| - tau_x K |e_k><e_k| K tau_x).
inline CMatrix reconstruct(const QuasiparticleSpectrum& s) {
  CMatrix a = CMatrix::Zero(2 * s.n, 2 * s.n);
  for (int k = 0; k < s.n; ++k)
    a += s.energies(k) * (s.modes.col(k) * s.modes.col(k).adjoint() -
                          s.hole_partners.col(k) * s.hole_partners.col(k).adjoint());
  return a;
}

}  // namespace tetron
