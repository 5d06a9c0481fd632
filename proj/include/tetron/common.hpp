#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tetron {

using cplx = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a numerical invariant (Hermiticity, orthogonality, purity, ...)
/// is violated beyond its tolerance. Signals a basis or sign bug, never bad input.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Tolerances used by the checks in every module. Defaults are the contract values.
struct Tolerances {
  double hermitian = 1e-12;
  double particle_hole = 1e-12;
  double eigen_residual = 1e-10;
  double projector = 1e-10;
  double orthogonality = 1e-10;
  double purity = 1e-9;
  double clamp = 1e-9;
  double center_tie = 1e-6;
  double mzm_closure = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

/// Operator 2-norm (largest singular value).
template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(m);
  return svd.singularValues()(0);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace tetron
