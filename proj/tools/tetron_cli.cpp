// tetron: command-line runner for spectra, Wannier profiles, rate sweeps and
// oracle validation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "tetron/tetron.hpp"

#ifndef TETRON_GIT_REVISION
#define TETRON_GIT_REVISION "unknown"
#endif

namespace {

using tetron::ConfigError;
using tetron::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Overrides {
  std::string config_file;
  std::optional<double> mu, w, delta, dmu;
  std::optional<int> n, realizations, lambda;
  std::vector<int> d;
  std::vector<double> q;
  std::optional<long long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  bool exhaustive = false;
};

void add_physics_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_file, "YAML run configuration")->check(CLI::ExistingFile);
  app->add_option("--mu", o.mu, "chemical potential");
  app->add_option("--w", o.w, "hopping amplitude");
  app->add_option("--delta", o.delta, "pairing amplitude");
  app->add_option("--n", o.n, "sites per chain");
  app->add_option("--dmu", o.dmu, "uniform on-site disorder amplitude");
  app->add_option("--realizations", o.realizations, "disorder realizations");
  app->add_option("--seed", o.seed, "random seed (disorder and sampling)");
  app->add_option("-o,--output", o.output, "output CSV path (stdout if omitted)");
}

void add_rate_options(CLI::App* app, Overrides& o) {
  app->add_option("--d", o.d, "code distance parameter(s)")->delimiter(',');
  app->add_option("--lambda", o.lambda, "detector inverse resolution");
  app->add_option("--q", o.q, "noise strength(s)")->delimiter(',');
}

template <typename T>
void read_key(const YAML::Node& node, const char* key, T& target) {
  if (node && node[key]) target = node[key].as<T>();
}

template <typename T>
void read_list(const YAML::Node& node, const char* key, std::vector<T>& target) {
  if (!node || !node[key]) return;
  const YAML::Node v = node[key];
  target.clear();
  if (v.IsSequence())
    for (const auto& x : v) target.push_back(x.as<T>());
  else
    target.push_back(v.as<T>());
}

void load_yaml(const std::string& path, RunConfig& c) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  try {
    read_key(root, "preset", c.preset);
    const YAML::Node phys = root["physics"];
    read_key(phys, "mu", c.mu);
    read_key(phys, "w", c.w);
    read_key(phys, "delta", c.delta);
    read_key(phys, "n", c.n);
    read_key(phys, "dmu", c.dmu);
    read_key(phys, "realizations", c.realizations);
    const YAML::Node code = root["code"];
    read_list(code, "d", c.d);
    read_key(code, "lambda", c.lambda);
    read_list(root["noise"], "q", c.q);
    const YAML::Node mc = root["mc"];
    read_key(mc, "samples", c.samples);
    read_key(mc, "seed", c.seed);
    read_key(mc, "exhaustive", c.exhaustive);
    read_key(root, "output", c.output);
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value in " + path + ": " + e.what());
  }
}

RunConfig resolve(RunConfig c, const Overrides& o) {
  if (!o.config_file.empty()) load_yaml(o.config_file, c);
  if (o.mu) c.mu = *o.mu;
  if (o.w) c.w = *o.w;
  if (o.delta) c.delta = *o.delta;
  if (o.n) c.n = *o.n;
  if (o.dmu) c.dmu = *o.dmu;
  if (o.realizations) c.realizations = *o.realizations;
  if (o.lambda) c.lambda = *o.lambda;
  if (!o.d.empty()) c.d = o.d;
  if (!o.q.empty()) c.q = o.q;
  if (o.samples) c.samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (o.output) c.output = *o.output;
  if (o.exhaustive) c.exhaustive = true;
  return c;
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"mode", c.mode},
          {"preset", c.preset},
          {"physics", {{"mu", c.mu}, {"w", c.w}, {"delta", c.delta}, {"n", c.n}, {"dmu", c.dmu},
                       {"realizations", c.realizations}}},
          {"code", {{"d", c.d}, {"lambda", c.lambda}}},
          {"noise", {{"q", c.q}}},
          {"mc", {{"samples", c.samples}, {"seed", c.seed}, {"exhaustive", c.exhaustive}}},
          {"output", c.output}};
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + path);
  f << text;
}

void write_sidecar(const RunConfig& c, const nlohmann::json& extra) {
  if (c.output.empty()) return;
  nlohmann::json meta{{"tool", "tetron"}, {"git_revision", TETRON_GIT_REVISION}, {"seed", c.seed},
                      {"config", config_json(c)}};
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  std::ofstream f(c.output + ".meta.json");
  if (!f) throw ConfigError("cannot write metadata for " + c.output);
  f << meta.dump(2) << '\n';
}

std::pair<tetron::ChainParams, tetron::ChainParams> chains(const RunConfig& c) {
  return {tetron::realization_chain(c, 0, 1), tetron::realization_chain(c, 0, 2)};
}

int run_spectrum(const RunConfig& c) {
  c.validate();
  const auto [c1, c2] = chains(c);
  std::vector<tetron::QuasiparticleSpectrum> specs{tetron::diagonalize(tetron::build_bdg(c1)),
                                                   tetron::diagonalize(tetron::build_bdg(c2))};
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& s : specs)
    for (const auto& w : s.warnings) {
      std::cerr << "warning: " << w << '\n';
      warnings.push_back(w);
    }
  std::ostringstream os;
  tetron::write_spectrum_csv(os, specs);
  write_text(c.output, os.str());
  write_sidecar(c, {{"warnings", warnings}});
  return kExitOk;
}

nlohmann::json wannier_meta(const std::vector<tetron::WannierBasis>& wbs) {
  nlohmann::json chains_meta = nlohmann::json::array();
  for (const auto& wb : wbs)
    chains_meta.push_back({{"center_ties", wb.has_ties()}, {"labels_match_index", wb.labels_match_index()}});
  return {{"interval_label_rule", "WQP l belongs to interval I if round(x_l - 1/2) is in I"}, {"chains", chains_meta}};
}

std::string wannier_table(const RunConfig& c, std::vector<tetron::WannierBasis>& wbs) {
  const auto [c1, c2] = chains(c);
  wbs = {tetron::wannier_basis(tetron::diagonalize(tetron::build_bdg(c1))),
         tetron::wannier_basis(tetron::diagonalize(tetron::build_bdg(c2)))};
  std::ostringstream os;
  tetron::write_wannier_csv(os, wbs);
  return os.str();
}

int run_wannier(const RunConfig& c) {
  c.validate();
  std::vector<tetron::WannierBasis> wbs;
  write_text(c.output, wannier_table(c, wbs));
  write_sidecar(c, wannier_meta(wbs));
  return kExitOk;
}

int run_rate_table(const RunConfig& c) {
  const auto rows = tetron::run_rates(c);
  std::ostringstream os;
  tetron::write_rate_csv(os, rows);
  write_text(c.output, os.str());
  nlohmann::json extra = nlohmann::json::object();
  for (const auto& r : rows)
    if (std::isnan(r.p_bitflip)) {
      extra["notes"] = {"p_bitflip is nan where mean <P_S> was below 10 standard errors"};
      break;
    }
  write_sidecar(c, extra);
  return kExitOk;
}

int run_sweep(const std::string& name, const Overrides& o) {
  RunConfig c = resolve(tetron::preset(name), o);
  if (name == "fig3") {
    if (c.output.empty()) throw ConfigError("sweep fig3 writes two panels and needs --output");
    const std::string out = c.output;
    RunConfig bottom = c;
    bottom.mu = 0.99;
    bottom.delta = 0.05;
    std::vector<tetron::WannierBasis> top_wb, bottom_wb;
    c.validate();
    bottom.validate();
    write_text(with_suffix(out, "_top"), wannier_table(c, top_wb));
    write_text(with_suffix(out, "_bottom"), wannier_table(bottom, bottom_wb));
    write_sidecar(c, {{"panels", {{"top", {{"file", with_suffix(out, "_top")}, {"mu", c.mu}, {"delta", c.delta},
                                            {"wannier", wannier_meta(top_wb)}}},
                                  {"bottom", {{"file", with_suffix(out, "_bottom")}, {"mu", bottom.mu},
                                              {"delta", bottom.delta}, {"wannier", wannier_meta(bottom_wb)}}}}}});
    return kExitOk;
  }
  const auto rows = tetron::run_rates(c);
  std::ostringstream os;
  tetron::write_rate_csv(os, rows);
  write_text(c.output, os.str());
  nlohmann::json extra{{"preset", name}};
  if (name == "fig5d")
    extra["notes"] = {"Delta = 0.1 as in the figure caption; the near-boundary Wannier panel uses Delta = 0.05"};
  if (name == "fig6") {
    const auto th = tetron::threshold_table(rows, c.d);
    std::ostringstream ts;
    tetron::write_threshold_csv(ts, th);
    const std::string th_path = c.output.empty() ? std::string() : with_suffix(c.output, "_thresholds");
    if (th_path.empty()) std::cout << '\n';
    write_text(th_path, ts.str());
    extra["threshold_file"] = th_path;
  }
  write_sidecar(c, extra);
  return kExitOk;
}

int run_validate() {
  const auto results = tetron::run_oracle_suite();
  int passed = 0;
  for (const auto& r : results) {
    std::printf("%-4s  %-66s  %.3e <= %.1e%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.value, r.tolerance,
                r.detail.empty() ? "" : "  ", r.detail.c_str());
    passed += r.passed ? 1 : 0;
  }
  std::printf("%d/%zu oracle checks passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorana tetron quasiparticle-detection simulator"};
  app.require_subcommand(1);

  Overrides o;
  std::string preset_name;

  auto* spectrum = app.add_subcommand("spectrum", "BdG energies of both chains (chain, k, energy)");
  add_physics_options(spectrum, o);
  auto* wannier = app.add_subcommand("wannier", "Wannier quasiparticle profiles (chain, l, x_l, site, amplitude)");
  add_physics_options(wannier, o);
  auto* fixed = app.add_subcommand("rates-fixed", "closed-form fixed-point rates over the (d, q) grid");
  add_physics_options(fixed, o);
  add_rate_options(fixed, o);
  auto* mc = app.add_subcommand("rates-mc", "Monte Carlo (or exhaustive) rates over the (d, q) grid");
  add_physics_options(mc, o);
  add_rate_options(mc, o);
  mc->add_option("--samples", o.samples, "Monte Carlo samples per grid point");
  mc->add_flag("--exhaustive", o.exhaustive, "enumerate all error patterns instead of sampling (n <= 12)");
  auto* sweep = app.add_subcommand("sweep", "figure presets");
  sweep->add_option("--preset", preset_name, "preset name")
      ->required()
      ->check(CLI::IsMember(tetron::preset_names()));
  add_physics_options(sweep, o);
  add_rate_options(sweep, o);
  sweep->add_option("--samples", o.samples, "Monte Carlo samples per grid point");
  auto* validate = app.add_subcommand("validate", "run the dense-oracle cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) return run_validate();
    if (sweep->parsed()) return run_sweep(preset_name, o);
    RunConfig base;
    if (spectrum->parsed()) base.mode = "spectrum";
    if (wannier->parsed()) base.mode = "wannier";
    if (fixed->parsed()) {
      base.mode = "rates-fixed";
      base.mu = 0.0;
      base.w = base.delta = 1.0;
    }
    if (mc->parsed()) base.mode = "rates-mc";
    const RunConfig c = resolve(base, o);
    if (c.mode == "spectrum") return run_spectrum(c);
    if (c.mode == "wannier") return run_wannier(c);
    if (c.mode == "rates-fixed" && (c.mu != 0.0 || c.w != 1.0 || c.delta != 1.0))
      throw ConfigError("rates-fixed evaluates the fixed point mu = 0, w = Delta = 1 only");
    return run_rate_table(c);
  } catch (const tetron::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::logic_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}
