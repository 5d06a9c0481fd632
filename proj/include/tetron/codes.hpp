#pragma once

// The tetron code family C_d: stabilizer labels, detection intervals and
// error-weight bookkeeping.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tetron {

/// E(J_1, J_2) = prod_p prod_{j in J_p} i c_{p,2j-1} c_{p,2j}. Sites are 1-based.
struct ErrorSample {
  int n = 0;
  std::vector<int> J1;
  std::vector<int> J2;

  const std::vector<int>& chain(int p) const { return p == 1 ? J1 : J2; }
  std::size_t size() const { return J1.size() + J2.size(); }

  void validate() const {
    for (const auto* set : {&J1, &J2}) {
      for (std::size_t i = 0; i < set->size(); ++i) {
        const int j = (*set)[i];
        if (j < 1 || j > n) throw std::out_of_range("ErrorSample: site " + std::to_string(j) + " outside 1.." + std::to_string(n));
        if (i > 0 && (*set)[i - 1] >= j) throw std::invalid_argument("ErrorSample: sites must be strictly increasing");
      }
    }
  }

  /// Bit k of mask_p marks site k+1 on chain p.
  static ErrorSample from_masks(int n, std::uint64_t mask1, std::uint64_t mask2) {
    ErrorSample s{n, {}, {}};
    for (int j = 1; j <= n; ++j) {
      if ((mask1 >> (j - 1)) & 1u) s.J1.push_back(j);
      if ((mask2 >> (j - 1)) & 1u) s.J2.push_back(j);
    }
    return s;
  }
};

struct ErrorWeight {
  int value = 0;
};

/// wt(E) = 2 max_p |J_p|.
inline ErrorWeight weight(const ErrorSample& s) {
  return {2 * static_cast<int>(std::max(s.J1.size(), s.J2.size()))};
}

/// Number of site Majoranas in the support of E(J_1, J_2), i.e. 2 (|J_1| + |J_2|).
inline int majorana_weight(const ErrorSample& s) { return 2 * static_cast<int>(s.size()); }

struct CodeSpec {
  int n = 2;
  int d = 0;
  int lambda = 1;

  void validate() const {
    if (n < 2) throw std::invalid_argument("CodeSpec: n must be >= 2");
    if (d < 0) throw std::invalid_argument("CodeSpec: d must be >= 0");
    if (2 * d >= n)
      throw std::invalid_argument("CodeSpec: d = " + std::to_string(d) + " violates d < n/2 for n = " + std::to_string(n));
    if (lambda < 1) throw std::invalid_argument("CodeSpec: lambda must be >= 1");
  }
  bool lambda_detecting() const { return d == 0 || lambda <= d; }
};

struct StabilizerLabel {
  bool parity = false;
  int p = 0;  // chain, 1 or 2 (QP labels only)
  int l = 0;  // WQP index 1..n-1 (QP labels only)

  std::string str() const { return parity ? "parity" : "(" + std::to_string(p) + "," + std::to_string(l) + ")"; }
  friend bool operator==(const StabilizerLabel&, const StabilizerLabel&) = default;
  friend auto operator<=>(const StabilizerLabel&, const StabilizerLabel&) = default;
};

/// Index of c'_{p,k} (k 1-based within the chain) in the 4n-dimensional c' ordering.
inline int cprime_index(int n, int p, int k) { return (p - 1) * 2 * n + (k - 1); }

struct StabilizerSet {
  int n = 0;
  int d = 0;
  std::vector<StabilizerLabel> labels;  // 'parity' first, then (p, l) ascending
  // Majorana support in the c' ordering: Q_{p,l} <-> (c'_{p,2l}, c'_{p,2l+1}),
  // Q_parity <-> (gamma_1, gamma_2, gamma_3, gamma_4).
  std::vector<std::vector<int>> support;

  std::vector<int> mzm_indices() const {
    return {cprime_index(n, 1, 1), cprime_index(n, 1, 2 * n), cprime_index(n, 2, 1), cprime_index(n, 2, 2 * n)};
  }
};

inline StabilizerSet stabilizer_set(const CodeSpec& spec) {
  spec.validate();
  StabilizerSet s;
  s.n = spec.n;
  s.d = spec.d;
  s.labels.push_back({true, 0, 0});
  s.support.push_back(s.mzm_indices());
  for (int p = 1; p <= 2; ++p) {
    std::vector<int> ls;
    for (int l = 1; l <= spec.d; ++l) ls.push_back(l);
    for (int l = spec.n - spec.d; l <= spec.n - 1; ++l) ls.push_back(l);
    for (int l : ls) {
      s.labels.push_back({false, p, l});
      s.support.push_back({cprime_index(spec.n, p, 2 * l), cprime_index(spec.n, p, 2 * l + 1)});
    }
  }
  return s;
}

struct Interval {
  int p = 1;
  int l_min = 1;
  int l_max = 1;
  int length() const { return l_max - l_min + 1; }
  bool contains(int chain, int l) const { return chain == p && l >= l_min && l <= l_max; }
};

struct DetectionIntervals {
  std::vector<Interval> intervals;

  std::vector<StabilizerLabel> labels() const {
    std::vector<StabilizerLabel> out;
    for (const auto& iv : intervals)
      for (int l = iv.l_min; l <= iv.l_max; ++l) out.push_back({false, iv.p, l});
    std::sort(out.begin(), out.end());
    return out;
  }

  bool pairwise_disjoint() const {
    for (std::size_t a = 0; a < intervals.size(); ++a)
      for (std::size_t b = a + 1; b < intervals.size(); ++b) {
        const auto& x = intervals[a];
        const auto& y = intervals[b];
        if (x.p == y.p && x.l_min <= y.l_max && y.l_min <= x.l_max) return false;
      }
    return true;
  }
};

/// I_{p,1} = {1..d}_p and I_{p,2} = {n-d..n-1}_p. Rejects detectors whose inverse
/// resolution exceeds d; d = 0 yields no intervals (parity measurement only).
inline DetectionIntervals detection_intervals(const CodeSpec& spec) {
  spec.validate();
  DetectionIntervals out;
  if (spec.d == 0) return out;
  if (!spec.lambda_detecting())
    throw std::invalid_argument("detection_intervals: C_" + std::to_string(spec.d) +
                                " is not error-detecting for lambda = " + std::to_string(spec.lambda));
  for (int p = 1; p <= 2; ++p) {
    out.intervals.push_back({p, 1, spec.d});
    out.intervals.push_back({p, spec.n - spec.d, spec.n - 1});
  }
  return out;
}

/// l_even(C_d).
inline int even_distance(const CodeSpec& spec) { return 4 * spec.d + 4; }

}  // namespace tetron
