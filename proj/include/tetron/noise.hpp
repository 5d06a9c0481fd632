#pragma once

// i.i.d. elementary-error channel and rate estimation over Gaussian evaluations.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tetron/bdg.hpp"
#include "tetron/codes.hpp"
#include "tetron/gaussian.hpp"
#include "tetron/wannier.hpp"

namespace tetron {

struct NoiseModel {
  double q = 0.0;
  void validate() const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("NoiseModel: q must lie in [0, 1]");
  }
};

template <typename Rng>
ErrorSample sample_error(Rng& rng, double q, int n) {
  NoiseModel{q}.validate();
  ErrorSample s{n, {}, {}};
  std::bernoulli_distribution hit(q);
  for (int j = 1; j <= n; ++j)
    if (hit(rng)) s.J1.push_back(j);
  for (int j = 1; j <= n; ++j)
    if (hit(rng)) s.J2.push_back(j);
  return s;
}

/// q^{|J1|+|J2|} (1-q)^{2n-|J1|-|J2|}.
inline double sample_probability(const ErrorSample& s, double q, int n) {
  NoiseModel{q}.validate();
  const int k = static_cast<int>(s.size());
  return std::pow(q, k) * std::pow(1.0 - q, 2 * n - k);
}

// ---------------------------------------------------------------------------
// Deterministic parallelism helpers.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for sample `index` of a run seeded with `seed`; independent of scheduling.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Worker count from TETRON_WORKERS, else the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("TETRON_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw std::invalid_argument("TETRON_WORKERS must be a positive integer, got '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on a pool of threads. The first exception is rethrown.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int workers = 0) {
  if (workers <= 0) workers = worker_count();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (cascade) summation over [first, last); the split points depend
/// only on the length, so the result is bit-stable.
inline double pairwise_sum(const double* first, std::size_t len) {
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += first[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(first, half) + pairwise_sum(first + half, len - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// ---------------------------------------------------------------------------

struct RateEstimate {
  double p_loss = 0.0;
  double p_loss_se = 0.0;
  double p_bitflip = 0.0;
  double p_bitflip_se = 0.0;
  long long samples = 0;  // 0 for exhaustive evaluation
  std::uint64_t seed = 0;
  bool exhaustive = false;
  double mean_ps = 0.0;  // <P_S> averaged over the channel
};

class InsufficientStatistics : public std::runtime_error {
 public:
  explicit InsufficientStatistics(const std::string& what) : std::runtime_error(what) {}
};

/// Two Kitaev chains, their Wannier bases and the code C_d, ready for sampling.
class TetronModel {
 public:
  TetronModel(ChainParams chain1, ChainParams chain2, CodeSpec code, const Tolerances& tol = default_tolerances())
      : chain1_(std::move(chain1)), chain2_(std::move(chain2)), code_(code) {
    chain1_.chain_id = 1;
    chain2_.chain_id = 2;
    if (chain1_.n != chain2_.n || chain1_.n != code_.n)
      throw std::invalid_argument("TetronModel: chain lengths and code n must agree");
    code_.validate();
    if (code_.d > 0) detection_intervals(code_);
    spec1_ = diagonalize(build_bdg(chain1_), tol);
    spec2_ = diagonalize(build_bdg(chain2_), tol);
    wb1_ = wannier_basis(spec1_, tol);
    wb2_ = wannier_basis(spec2_, tol);
    evaluator_.emplace(BasisChange::from_chains(wb1_, wb2_, tol), stabilizer_set(code_), initial_covariance(code_.n));
  }

  static TetronModel fixed_point(int n, int d, int lambda = 1) {
    return TetronModel(ChainParams::fixed_point(n, 1), ChainParams::fixed_point(n, 2), CodeSpec{n, d, lambda});
  }

  int n() const { return code_.n; }
  const CodeSpec& code() const { return code_; }
  const ChainParams& chain(int p) const { return p == 1 ? chain1_ : chain2_; }
  const QuasiparticleSpectrum& spectrum(int p) const { return p == 1 ? spec1_ : spec2_; }
  const WannierBasis& wannier(int p) const { return p == 1 ? wb1_ : wb2_; }
  const GaussianEvaluator& evaluator() const { return *evaluator_; }

 private:
  ChainParams chain1_, chain2_;
  CodeSpec code_;
  QuasiparticleSpectrum spec1_, spec2_;
  WannierBasis wb1_, wb2_;
  std::optional<GaussianEvaluator> evaluator_;
};

namespace detail {

/// Ratio-of-means summary with delta-method standard errors.
inline RateEstimate summarize_samples(const std::vector<double>& ps, const std::vector<double>& zn,
                                      std::uint64_t seed, bool strict) {
  const auto count = static_cast<double>(ps.size());
  const double mx = pairwise_sum(ps) / count;
  const double my = pairwise_sum(zn) / count;
  std::vector<double> sxx(ps.size()), syy(ps.size()), sxy(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    sxx[i] = (ps[i] - mx) * (ps[i] - mx);
    syy[i] = (zn[i] - my) * (zn[i] - my);
    sxy[i] = (ps[i] - mx) * (zn[i] - my);
  }
  const double denom = count > 1 ? count - 1 : 1.0;
  const double vx = pairwise_sum(sxx) / denom;
  const double vy = pairwise_sum(syy) / denom;
  const double cxy = pairwise_sum(sxy) / denom;

  RateEstimate r;
  r.samples = static_cast<long long>(ps.size());
  r.seed = seed;
  r.mean_ps = mx;
  r.p_loss = std::clamp(1.0 - mx, 0.0, 1.0);
  r.p_loss_se = std::sqrt(vx / count);
  if (mx == 0.0 || mx < 10.0 * r.p_loss_se) {
    if (strict)
      throw InsufficientStatistics("estimate_rates: mean <P_S> = " + std::to_string(mx) + " is below 10 stderr (" +
                                   std::to_string(r.p_loss_se) + "); bit-flip rate undefined (seed " +
                                   std::to_string(seed) + ")");
    r.p_bitflip = std::nan("");
    r.p_bitflip_se = std::nan("");
    return r;
  }
  const double z = my / mx;
  const double var_z = (vy - 2.0 * z * cxy + z * z * vx) / (count * mx * mx);
  r.p_bitflip = std::clamp((1.0 - z) / 2.0, 0.0, 1.0);
  r.p_bitflip_se = 0.5 * std::sqrt(std::max(0.0, var_z));
  return r;
}

}  // namespace detail

/// Monte Carlo estimate over `samples` draws of the channel with substreams
/// derived from (seed, sample index). With strict = false an undefined bit-flip
/// rate is reported as NaN instead of throwing.
inline RateEstimate estimate_rates(const TetronModel& model, double q, long long samples, std::uint64_t seed,
                                   bool strict = true, int workers = 0) {
  NoiseModel{q}.validate();
  if (samples < 1) throw std::invalid_argument("estimate_rates: samples must be >= 1");
  const int n = model.n();
  std::vector<double> ps(static_cast<std::size_t>(samples)), zn(static_cast<std::size_t>(samples));
  const auto& ev = model.evaluator();
  parallel_for(
      static_cast<std::size_t>(samples),
      [&](std::size_t i) {
        auto rng = sample_stream(seed, i);
        const ErrorSample s = sample_error(rng, q, n);
        if (s.size() == 0) {
          ps[i] = 1.0;
          zn[i] = 1.0;
          return;
        }
        const auto e = ev.evaluate(s);
        ps[i] = e.ps;
        zn[i] = e.znum;
      },
      workers);
  return detail::summarize_samples(ps, zn, seed, strict);
}

/// Exact channel average by enumerating all 4^n error patterns (n <= 12).
inline RateEstimate estimate_rates_exhaustive(const TetronModel& model, double q, int workers = 0) {
  NoiseModel{q}.validate();
  const int n = model.n();
  if (n > 12) throw std::invalid_argument("estimate_rates_exhaustive: n must be <= 12");
  const std::size_t per_chain = std::size_t{1} << n;
  const std::size_t total = per_chain * per_chain;
  std::vector<double> wps(total), wzn(total);
  const auto& ev = model.evaluator();
  parallel_for(
      total,
      [&](std::size_t idx) {
        const ErrorSample s = ErrorSample::from_masks(n, idx / per_chain, idx % per_chain);
        const double prob = sample_probability(s, q, n);
        if (prob == 0.0) {
          wps[idx] = 0.0;
          wzn[idx] = 0.0;
          return;
        }
        const auto e = ev.evaluate(s);
        wps[idx] = prob * e.ps;
        wzn[idx] = prob * e.znum;
      },
      workers);
  RateEstimate r;
  r.exhaustive = true;
  r.mean_ps = pairwise_sum(wps);
  r.p_loss = std::clamp(1.0 - r.mean_ps, 0.0, 1.0);
  if (r.mean_ps <= 0.0) throw InsufficientStatistics("estimate_rates_exhaustive: <P_S> vanishes");
  r.p_bitflip = std::clamp((1.0 - pairwise_sum(wzn) / r.mean_ps) / 2.0, 0.0, 1.0);
  return r;
}

}  // namespace tetron
