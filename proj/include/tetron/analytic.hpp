#pragma once

// Closed-form rates at the fixed point mu = 0, w = Delta = 1.

#include <cmath>
#include <stdexcept>

namespace tetron {

struct FixedPointRates {
  double p_loss = 0.0;
  double p_bitflip = 0.0;
};

namespace detail {
inline void check_qd(int d, double q) {
  if (d < 0) throw std::invalid_argument("d must be >= 0");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
}

// Probability that no detection fires: every detection region carries an even
// number of complete region flips (none, two, or all four).
inline double fixed_point_pass(int d, double q) {
  const double k = 2.0 * d + 2.0;
  return std::pow(1.0 - q, 2 * k) + 6.0 * std::pow(q, k) * std::pow(1.0 - q, k) + std::pow(q, 2 * k);
}
}  // namespace detail

inline double p_loss_fixed(int d, double q) {
  detail::check_qd(d, q);
  return 1.0 - detail::fixed_point_pass(d, q);
}

inline double p_bitflip_fixed(int d, double q) {
  detail::check_qd(d, q);
  const double k = 2.0 * d + 2.0;
  const double den = detail::fixed_point_pass(d, q);
  if (den <= 0.0) throw std::domain_error("p_bitflip_fixed: no undetected outcomes");
  return 4.0 * std::pow(q, k) * std::pow(1.0 - q, k) / den;
}

inline FixedPointRates fixed_point_rates(int d, double q) { return {p_loss_fixed(d, q), p_bitflip_fixed(d, q)}; }

/// Asymptotic trade-off 4 q^{p_loss / (4q)}, meaningful only for q << 1/d << 1.
inline double tradeoff_bound(double q, double p_loss_target) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("tradeoff_bound: q must lie in (0, 1]");
  if (!(p_loss_target >= 0.0 && p_loss_target < 1.0))
    throw std::invalid_argument("tradeoff_bound: p_loss target must lie in [0, 1)");
  return 4.0 * std::pow(q, p_loss_target / (4.0 * q));
}

inline bool tradeoff_in_validity_range(double q, double p_loss_target) {
  const double d = p_loss_target / (4.0 * q);
  return q < 0.1 && d >= 1.0 && q * d < 0.1;
}

/// q in (0, 1/2) with p_bitflip_fixed(d, q) = level, by bisection.
inline double fixed_point_threshold(int d, double level) {
  if (!(level > 0.0 && level < 0.5)) throw std::invalid_argument("fixed_point_threshold: level must lie in (0, 1/2)");
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p_bitflip_fixed(d, mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tetron
