#pragma once

// Batch runner: run configuration, sweep presets, rate tables, threshold
// readout and CSV output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tetron/analytic.hpp"
#include "tetron/bdg.hpp"
#include "tetron/codes.hpp"
#include "tetron/noise.hpp"
#include "tetron/wannier.hpp"

namespace tetron {

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct RunConfig {
  std::string mode = "rates-mc";  // spectrum | wannier | rates-fixed | rates-mc | sweep | validate
  std::string preset;             // sweep only

  double mu = 0.0;
  double w = 1.0;
  double delta = 1.0;
  int n = 16;
  double dmu = 0.0;
  int realizations = 1;

  std::vector<int> d{0};
  int lambda = 1;
  std::vector<double> q{0.05};

  long long samples = 10000;
  std::uint64_t seed = 1;
  bool exhaustive = false;

  std::string output;  // empty means stdout

  void validate() const {
    static const std::vector<std::string> modes{"spectrum", "wannier", "rates-fixed", "rates-mc", "sweep", "validate"};
    if (std::find(modes.begin(), modes.end(), mode) == modes.end()) throw ConfigError("unknown mode '" + mode + "'");
    if (mode == "validate" || mode == "sweep") return;
    try {
      ChainParams{mu, w, delta, n, {}, 1}.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (dmu < 0.0) throw ConfigError("dmu must be >= 0");
    if (realizations < 1) throw ConfigError("realizations must be >= 1");
    if (mode == "spectrum" || mode == "wannier") return;
    if (d.empty()) throw ConfigError("code.d must list at least one distance");
    if (q.empty()) throw ConfigError("noise.q must list at least one value");
    for (double x : q)
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("q values must lie in [0, 1]");
    for (int dd : d) {
      try {
        const CodeSpec spec{n, dd, lambda};
        spec.validate();
        if (dd > 0) detection_intervals(spec);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (mode == "rates-mc" && !exhaustive && samples < 1) throw ConfigError("mc.samples must be >= 1");
    if (mode == "rates-mc" && exhaustive && n > 12) throw ConfigError("exhaustive evaluation requires n <= 12");
  }
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig3", "fig5a", "fig5b", "fig5c", "fig5d", "fig6"};
  return names;
}

/// Preset grids. fig3 is a Wannier-profile preset; the others are rate sweeps.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.d = {0, 1, 2, 3, 4, 5, 6};
  c.q = {0.01, 0.05, 0.1};
  c.samples = 10000;
  if (name == "fig3") {
    c.mode = "wannier";
    c.mu = 0.3;
    c.delta = 0.4;
    c.n = 50;
  } else if (name == "fig5a") {
    c.mode = "rates-fixed";
    c.mu = 0.0;
    c.delta = 1.0;
    c.n = 16;
  } else if (name == "fig5b") {
    c.mode = "rates-mc";
    c.mu = 0.3;
    c.delta = 0.4;
    c.n = 30;
  } else if (name == "fig5c") {
    c.mode = "rates-mc";
    c.mu = 0.3;
    c.delta = 0.4;
    c.n = 30;
    c.dmu = 0.3;
    c.realizations = 10;
  } else if (name == "fig5d") {
    c.mode = "rates-mc";
    c.mu = 0.99;
    c.delta = 0.1;
    c.n = 30;
  } else if (name == "fig6") {
    c.mode = "rates-mc";
    c.mu = 0.95;
    c.delta = 0.05;
    c.n = 30;
    c.d = {0, 2, 4, 6};
    c.q = {0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.1, 0.12, 0.15};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Rate tables.

struct RateRow {
  double mu = 0, w = 1, delta = 0;
  int n = 0;
  double dmu = 0;
  int realization = 0;  // -1 marks the aggregate over realizations
  int d = 0;
  int lambda = 1;
  double q = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
  double p_loss = 0, p_loss_se = 0, p_bitflip = 0, p_bitflip_se = 0;
};

inline const char* rate_csv_header() {
  return "mu,w,delta,n,dmu,realization,d,lambda,q,samples,seed,p_loss,p_loss_se,p_bitflip,p_bitflip_se";
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << rate_csv_header() << '\n';
  for (const auto& r : rows)
    os << format_double(r.mu) << ',' << format_double(r.w) << ',' << format_double(r.delta) << ',' << r.n << ','
       << format_double(r.dmu) << ',' << r.realization << ',' << r.d << ',' << r.lambda << ',' << format_double(r.q)
       << ',' << r.samples << ',' << r.seed << ',' << format_double(r.p_loss) << ',' << format_double(r.p_loss_se)
       << ',' << format_double(r.p_bitflip) << ',' << format_double(r.p_bitflip_se) << '\n';
}

/// Mean and standard error of the mean across realization rows; NaN entries are skipped.
inline RateRow aggregate_rows(const std::vector<RateRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate_rows: no rows");
  RateRow agg = rows.front();
  agg.realization = -1;
  long long samples = 0;
  for (const auto& r : rows) samples += r.samples;
  agg.samples = samples;
  auto stats = [&](auto get, double& mean, double& se) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (!std::isnan(get(r))) v.push_back(get(r));
    if (v.empty()) {
      mean = se = std::nan("");
      return;
    }
    const double m = pairwise_sum(v) / static_cast<double>(v.size());
    std::vector<double> dev;
    for (double x : v) dev.push_back((x - m) * (x - m));
    const double var = v.size() > 1 ? pairwise_sum(dev) / static_cast<double>(v.size() - 1) : 0.0;
    mean = m;
    se = std::sqrt(var / static_cast<double>(v.size()));
  };
  stats([](const RateRow& r) { return r.p_loss; }, agg.p_loss, agg.p_loss_se);
  stats([](const RateRow& r) { return r.p_bitflip; }, agg.p_bitflip, agg.p_bitflip_se);
  return agg;
}

inline ChainParams realization_chain(const RunConfig& c, int realization, int chain_id) {
  ChainParams p{c.mu, c.w, c.delta, c.n, {}, chain_id};
  if (c.dmu > 0.0) p.disorder = draw_disorder(c.n, c.dmu, c.seed, realization, chain_id);
  return p;
}

/// Rows in grid order: realization, then d, then q. Disordered runs append one
/// aggregate row (realization = -1) per (d, q) after the per-realization rows.
inline std::vector<RateRow> run_rates(const RunConfig& c) {
  c.validate();
  std::vector<RateRow> rows;
  const bool fixed = c.mode == "rates-fixed";
  const int nreal = c.dmu > 0.0 ? c.realizations : 1;
  for (int r = 0; r < nreal; ++r) {
    for (int d : c.d) {
      std::optional<TetronModel> model;
      if (!fixed) model.emplace(realization_chain(c, r, 1), realization_chain(c, r, 2), CodeSpec{c.n, d, c.lambda});
      for (double q : c.q) {
        RateRow row{c.mu, c.w, c.delta, c.n, c.dmu, r, d, c.lambda, q, 0, c.seed, 0, 0, 0, 0};
        if (fixed) {
          row.p_loss = p_loss_fixed(d, q);
          row.p_bitflip = p_bitflip_fixed(d, q);
        } else {
          const RateEstimate e = c.exhaustive ? estimate_rates_exhaustive(*model, q)
                                              : estimate_rates(*model, q, c.samples, c.seed, false);
          row.samples = e.samples;
          row.p_loss = e.p_loss;
          row.p_loss_se = e.p_loss_se;
          row.p_bitflip = e.p_bitflip;
          row.p_bitflip_se = e.p_bitflip_se;
        }
        rows.push_back(row);
      }
    }
  }
  if (c.dmu > 0.0) {
    for (int d : c.d)
      for (double q : c.q) {
        std::vector<RateRow> group;
        for (const auto& row : rows)
          if (row.realization >= 0 && row.d == d && row.q == q) group.push_back(row);
        rows.push_back(aggregate_rows(group));
      }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Threshold readout.

struct ThresholdEstimate {
  bool reached = false;
  double q_th = std::nan("");
  double q_lo = std::nan("");  // bracketing grid points
  double q_hi = std::nan("");
};

/// First upward crossing of `level` in a q-ordered series, by linear
/// interpolation of log(rate) in q (plain linear if a bracketing rate is zero).
inline ThresholdEstimate threshold_estimate(const std::vector<double>& q, const std::vector<double>& rate,
                                            double level) {
  if (q.size() != rate.size()) throw std::invalid_argument("threshold_estimate: series lengths differ");
  if (!(level > 0.0)) throw std::invalid_argument("threshold_estimate: level must be > 0");
  ThresholdEstimate out;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    if (q[i + 1] <= q[i]) throw std::invalid_argument("threshold_estimate: q must be strictly increasing");
    const double a = rate[i], b = rate[i + 1];
    if (std::isnan(a) || std::isnan(b)) continue;
    if (a < level && b >= level) {
      double t;
      if (a > 0.0) t = (std::log(level) - std::log(a)) / (std::log(b) - std::log(a));
      else t = (level - a) / (b - a);
      out.reached = true;
      out.q_th = q[i] + t * (q[i + 1] - q[i]);
      out.q_lo = q[i];
      out.q_hi = q[i + 1];
      return out;
    }
  }
  if (!q.empty() && !std::isnan(rate.front()) && rate.front() >= level) {
    out.reached = true;
    out.q_th = q.front();
    out.q_lo = out.q_hi = q.front();
  }
  return out;
}

struct ThresholdRow {
  int d = 0;
  std::string metric;  // p_bitflip | p_loss
  double level = 0;
  ThresholdEstimate est;
};

inline std::vector<ThresholdRow> threshold_table(const std::vector<RateRow>& rows, const std::vector<int>& ds,
                                                 double bitflip_level = 0.01, double loss_level = 0.5) {
  std::vector<ThresholdRow> out;
  for (int d : ds) {
    std::vector<double> q, bf, loss;
    for (const auto& r : rows)
      if (r.d == d && r.realization <= 0 && (r.realization == -1 || r.dmu == 0.0)) {
        q.push_back(r.q);
        bf.push_back(r.p_bitflip);
        loss.push_back(r.p_loss);
      }
    out.push_back({d, "p_bitflip", bitflip_level, threshold_estimate(q, bf, bitflip_level)});
    out.push_back({d, "p_loss", loss_level, threshold_estimate(q, loss, loss_level)});
  }
  return out;
}

inline void write_threshold_csv(std::ostream& os, const std::vector<ThresholdRow>& rows) {
  os << "d,metric,level,status,q_th,q_lo,q_hi\n";
  for (const auto& r : rows)
    os << r.d << ',' << r.metric << ',' << format_double(r.level) << ',' << (r.est.reached ? "crossed" : "not reached")
       << ',' << format_double(r.est.q_th) << ',' << format_double(r.est.q_lo) << ',' << format_double(r.est.q_hi)
       << '\n';
}

// ---------------------------------------------------------------------------
// Spectrum and Wannier tables.

inline void write_spectrum_csv(std::ostream& os, const std::vector<QuasiparticleSpectrum>& chains) {
  os << "chain,k,energy\n";
  for (std::size_t p = 0; p < chains.size(); ++p)
    for (Eigen::Index k = 0; k < chains[p].energies.size(); ++k)
      os << p + 1 << ',' << k << ',' << format_double(chains[p].energies(k)) << '\n';
}

/// Columns chain, l, x_l, site, amplitude; one row per (WQP, site).
inline void write_wannier_csv(std::ostream& os, const std::vector<WannierBasis>& chains) {
  os << "chain,l,x_l,site,amplitude\n";
  for (std::size_t p = 0; p < chains.size(); ++p) {
    const auto& wb = chains[p];
    for (int l = 1; l < wb.n; ++l) {
      const RVector amp = site_amplitudes(CVector(wb.phi.col(l - 1)));
      for (int j = 1; j <= wb.n; ++j)
        os << p + 1 << ',' << l << ',' << format_double(wb.centers(l - 1)) << ',' << j << ','
           << format_double(amp(j - 1)) << '\n';
    }
  }
}

}  // namespace tetron
