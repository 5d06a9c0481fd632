#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace tetron {

/// Pfaffian of a skew-symmetric matrix by Parlett-Reid tridiagonalization with
/// partial pivoting, O(m^3). The input is taken by value and overwritten.
template <typename Scalar>
Scalar pfaffian(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a) {
  using std::abs;
  const Eigen::Index m = a.rows();
  if (a.cols() != m) throw std::invalid_argument("pfaffian: matrix must be square");
  if (m % 2 != 0) throw std::invalid_argument("pfaffian: dimension must be even");
  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < m; k += 2) {
    Eigen::Index piv = 0;
    a.col(k).tail(m - k - 1).cwiseAbs().maxCoeff(&piv);
    piv += k + 1;
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    if (a(k + 1, k) == Scalar(0)) return Scalar(0);
    pf *= a(k, k + 1);
    if (k + 2 < m) {
      const Eigen::Index r = m - k - 2;
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau = a.row(k).tail(r).transpose() / a(k, k + 1);
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = a.col(k + 1).tail(r);
      a.bottomRightCorner(r, r).noalias() += tau * col.transpose();
      a.bottomRightCorner(r, r).noalias() -= col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace tetron
