// Command-line front end: subspace estimation, estimator runs and the
// heatmap, noise and Ebola sweeps. Every verb writes CSV/JSON under --out.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gas/bench.hpp"
#include "gas/config.hpp"
#include "gas/error.hpp"
#include "gas/io.hpp"
#include "gas/models.hpp"
#include "gas/pce.hpp"
#include "gas/subspace.hpp"

namespace {

using gas::KeyValueConfig;

/// Flags of one subcommand, collected as strings and merged over the
/// optional config file.
struct Verb {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> params;  // model parameters, key=value
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool serial = false;
  bool needs_seed = true;

  void flag(const std::string& name, const std::string& key, const std::string& help) {
    options[key] = app->add_option(name, values[key], help);
  }

  KeyValueConfig gather() const {
    KeyValueConfig cfg;
    if (!config_path.empty()) cfg = KeyValueConfig::load(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg.set(key, values.at(key));
    }
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw gas::ConfigError("--param expects key=value, got '" + p + "'");
      cfg.set("model." + p.substr(0, eq), p.substr(eq + 1));
    }
    if (serial) cfg.set("execution", "serial");
    if (needs_seed && !cfg.contains("seed")) {
      throw gas::ConfigError("--seed is required (on the command line or in the config file)");
    }
    return cfg;
  }
};

std::unique_ptr<Verb> make_verb(CLI::App& root, const std::string& name, const std::string& help,
                                bool experiment = true) {
  auto v = std::make_unique<Verb>();
  v->app = root.add_subcommand(name, help);
  v->needs_seed = experiment;
  v->app->add_option("--config", v->config_path, "key = value file supplying any flag");
  if (experiment) {
    v->flag("--seed", "seed", "master seed (required)");
    v->flag("--out", "output_dir", "output directory (default .)");
    v->flag("--model", "model", "quadratic | heston | ridge | ebola | linear");
    v->app->add_option("--param", v->params, "model parameter key=value (repeatable)");
    v->app->add_flag("--serial", v->serial, "use the serial reference loops");
  }
  return v;
}

gas::Execution execution_of(const KeyValueConfig& cfg) {
  return cfg.get_string("execution", "parallel") == "serial" ? gas::Execution::Serial : gas::Execution::Parallel;
}

KeyValueConfig model_config(const KeyValueConfig& cfg, const std::string& fallback) {
  KeyValueConfig m;
  m.set("model", cfg.get_string("model", fallback));
  for (const auto& [k, v] : cfg.items()) {
    if (k.rfind("model.", 0) == 0) m.set(k.substr(6), v);
  }
  return m;
}

std::string out_path(const KeyValueConfig& cfg, const std::string& file) {
  return cfg.get_string("output_dir", ".") + "/" + file;
}

void emit(const std::string& path, const std::string& content) {
  gas::write_text_file(path, content);
  std::cout << "wrote " << path << "\n";
}

std::size_t get_size(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw gas::ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<double> doubles(const KeyValueConfig& cfg, const std::string& key, std::vector<double> fallback) {
  return cfg.get_doubles(key, std::move(fallback));
}

gas::GasConfig gas_config(const KeyValueConfig& cfg, std::uint64_t seed) {
  gas::GasConfig g;
  g.m1 = get_size(cfg, "m1", 1000);
  g.m2 = get_size(cfg, "m2", 10);
  g.denom_floor = cfg.get_double("denom_floor", g.denom_floor);
  g.companions = gas::parse_companion_scheme(cfg.get_string("companions", "shifted_sobol"));
  g.reuse_base = cfg.get_bool("reuse_base", true);
  g.seed = seed;
  g.execution = execution_of(cfg);
  return g;
}

gas::AsConfig as_config(const KeyValueConfig& cfg, std::uint64_t seed) {
  gas::AsConfig a;
  a.samples = get_size(cfg, "as_samples", 10000);
  a.h = cfg.get_double("h", 1e-3);
  a.seed = seed;
  a.execution = execution_of(cfg);
  return a;
}

// Decomposition from the method named in `method` (gas or as).
gas::SubspaceDecomposition subspace_of(const gas::ModelFunction& f, const KeyValueConfig& cfg, std::uint64_t seed) {
  const std::string method = cfg.get_string("method", "gas");
  gas::SubspaceDecomposition d;
  if (method == "gas") {
    const gas::GasConfig g = gas_config(cfg, seed);
    d = gas::decompose(gas::assemble_bhat(f, g));
    d.m1 = g.m1;
    d.m2 = g.m2;
  } else if (method == "as") {
    d = gas::as_gradient_matrix(f, as_config(cfg, seed)).decomposition;
  } else {
    throw gas::ConfigError("method must be 'gas' or 'as'");
  }
  d.seed = seed;
  d.model = f.fingerprint();
  return d;
}

// --- verbs -----------------------------------------------------------------

void run_eig(const KeyValueConfig& cfg) {
  const auto model = gas::make_model(model_config(cfg, "quadratic"));
  const std::uint64_t seed = cfg.get_uint("seed", 0);
  const std::string method = cfg.get_string("method", "gas");
  gas::SubspaceDecomposition d = subspace_of(*model, cfg, seed);
  if (cfg.contains("d1")) d.set_active_dimension(get_size(cfg, "d1", 1));
  const std::string stem = gas::output_stem(model->name(), method + "_eig", seed);
  emit(out_path(cfg, stem + ".csv"), gas::spectrum_to_csv(d));
  emit(out_path(cfg, stem + ".json"), gas::decomposition_to_json(d));
  if (method == "gas") {
    // Diagonal of C, divided and undivided, for comparison with Gamma and
    // the upper Sobol' indices.
    const gas::GasConfig g = gas_config(cfg, seed);
    const auto div = gas::bhat_diagonal(gas::assemble_bhat(*model, g), g.m1, g.m2);
    const auto undiv =
        gas::bhat_diagonal(gas::assemble_bhat(*model, g, gas::Quotient::Undivided), g.m1, g.m2);
    std::string csv = "index,c_diag,c_diag_se,undivided,undivided_se\n";
    for (Eigen::Index i = 0; i < div.values.size(); ++i) {
      csv += std::to_string(i + 1) + "," + gas::format_double(div.values(i)) + "," +
             gas::format_double(div.std_errors(i)) + "," + gas::format_double(undiv.values(i)) + "," +
             gas::format_double(undiv.std_errors(i)) + "\n";
    }
    emit(out_path(cfg, stem + "_cdiag.csv"), csv);
  }
  const Eigen::VectorXd norm = d.normalized();
  std::cout << "normalized spectrum:";
  for (Eigen::Index i = 0; i < norm.size(); ++i) std::cout << " " << gas::format_double(norm(i));
  std::cout << "\nselect_d1 = " << gas::select_d1(d.lambdas) << "\n";
}

void run_gamma(const KeyValueConfig& cfg) {
  const auto model = gas::make_model(model_config(cfg, "heston"));
  const std::uint64_t seed = cfg.get_uint("seed", 0);
  gas::SubspaceDecomposition d;
  if (cfg.contains("decomposition")) {
    d = gas::decomposition_from_json(gas::read_text_file(cfg.get_string("decomposition")));
  } else {
    d = subspace_of(*model, cfg, seed);
  }
  gas::GasConfig g = gas_config(cfg, seed ^ 0x5bd1e995ull);
  g.m1 = get_size(cfg, "gamma_m1", 2000);
  g.m2 = get_size(cfg, "gamma_m2", 10);
  const gas::GammaEstimates gam = gas::estimate_gamma(*model, d.U, g);
  d.set_active_dimension(gas::select_d1(gam.gammas));
  const std::string stem = gas::output_stem(model->name(), "gamma", seed);
  emit(out_path(cfg, stem + ".csv"), gas::gamma_to_csv(gam));
  emit(out_path(cfg, stem + ".json"), gas::gamma_to_json(gam));
  emit(out_path(cfg, stem + "_decomposition.json"), gas::decomposition_to_json(d));
  const Eigen::VectorXd norm = gam.normalized();
  std::cout << "normalized gamma:";
  for (Eigen::Index i = 0; i < norm.size(); ++i) std::cout << " " << gas::format_double(norm(i));
  std::cout << "\nselect_d1 = " << d.d1 << "\n";
}

void run_summary(const KeyValueConfig& cfg) {
  const auto model = gas::make_model(model_config(cfg, "ebola"));
  const std::uint64_t seed = cfg.get_uint("seed", 0);
  const gas::SubspaceDecomposition d = subspace_of(*model, cfg, seed);
  const std::size_t k = get_size(cfg, "active", 1);
  const std::size_t n = get_size(cfg, "points", 2000);
  const Eigen::MatrixXd table = gas::sufficient_summary(*model, d, k, n, seed ^ 0x2545F4914F6CDD1Dull, execution_of(cfg));
  const std::string stem = gas::output_stem(model->name(), cfg.get_string("method", "gas") + "_summary", seed);
  emit(out_path(cfg, stem + ".csv"), gas::summary_to_csv(table));
}

void run_price(const KeyValueConfig& cfg) {
  KeyValueConfig c = cfg;
  if (!c.contains("model")) c.set("model", "heston");
  const gas::ExperimentConfig e = gas::ExperimentConfig::from_config(c);
  e.validate();
  const auto model = gas::make_model(e.model);
  gas::ReferenceValue ref;
  if (c.contains("reference")) {
    ref.value = c.get_double("reference");
  } else {
    ref = gas::reference_value(*model, get_size(c, "reference_samples", 1000000),
                               gas::mix64(e.master_seed ^ 0xC0FFEEull), e.execution);
  }
  const gas::EstimatorResult r = gas::run_estimator(e, model, ref);
  const std::string stem = gas::output_stem(model->name(), gas::to_string(e.estimator), e.master_seed);
  emit(out_path(c, stem + ".json"), gas::result_to_json(r, e));
  emit(out_path(c, stem + ".csv"), gas::result_to_csv(r));
  emit(out_path(c, stem + ".timing.json"), gas::result_timing_to_json(r));
  std::cout << "reference " << gas::format_double(r.reference) << " (se " << gas::format_double(r.reference_se)
            << "), mse " << gas::format_double(r.mse) << ", wall " << r.wall_time << " s, "
            << r.failures.size() << " failed replications\n";
}

void run_heatmap(const KeyValueConfig& cfg) {
  KeyValueConfig c = cfg;
  KeyValueConfig base_model = gas::heatmap_base_model();
  for (const auto& [k, v] : base_model.items()) {
    const std::string key = k == "model" ? k : "model." + k;
    if (!c.contains(key)) c.set(key, v);
  }
  gas::HeatmapConfig h;
  h.base = gas::ExperimentConfig::from_config(c);
  if (!c.contains("k")) h.base.k = 40;
  h.sigmas = doubles(c, "sigmas", h.sigmas);
  h.rhos = doubles(c, "rhos", h.rhos);
  h.reference_samples = get_size(c, "reference_samples", h.reference_samples);
  h.enforce_equal_budget = c.get_bool("equal_budget", true);
  const gas::HeatmapGrid grid = gas::heatmap_sweep(h);
  const std::string stem = gas::output_stem("heston", "heatmap", h.base.master_seed);
  emit(out_path(c, stem + ".csv"), gas::heatmap_to_csv(grid));
  emit(out_path(c, stem + ".json"), gas::heatmap_to_json(grid));
}

std::vector<gas::GasSplit> parse_splits(const std::string& text) {
  std::vector<gas::GasSplit> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    const auto x = item.find('x');
    if (x == std::string::npos) throw gas::ConfigError("split '" + item + "' must look like M1xM2");
    out.push_back({std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1))});
    start = comma + 1;
  }
  return out;
}

void run_noise_study(const KeyValueConfig& cfg) {
  gas::NoiseStudyConfig n;
  KeyValueConfig m = model_config(cfg, "quadratic");
  n.model = gas::quadratic_from_config(m);
  n.sigmas = doubles(cfg, "sigmas", n.sigmas);
  n.hs = doubles(cfg, "hs", n.hs);
  if (cfg.contains("splits")) n.splits = parse_splits(cfg.get_string("splits"));
  n.as_samples = get_size(cfg, "as_samples", n.as_samples);
  n.compute_gamma = cfg.get_bool("gamma", n.compute_gamma);
  n.gamma_m1 = get_size(cfg, "gamma_m1", n.gamma_m1);
  n.gamma_m2 = get_size(cfg, "gamma_m2", n.gamma_m2);
  n.ref_as_samples = get_size(cfg, "ref_as_samples", n.ref_as_samples);
  n.ref_h = cfg.get_double("ref_h", n.ref_h);
  n.ref_m1 = get_size(cfg, "ref_m1", n.ref_m1);
  n.ref_m2 = get_size(cfg, "ref_m2", n.ref_m2);
  n.reuse_base = cfg.get_bool("reuse_base", n.reuse_base);
  n.enforce_equal_budget = cfg.get_bool("equal_budget", true);
  n.seed = cfg.get_uint("seed", 0);
  n.execution = execution_of(cfg);
  const gas::NoiseStudyReport r = gas::noise_study(n);
  const std::string stem = gas::output_stem("quadratic", "noise", n.seed);
  emit(out_path(cfg, stem + ".csv"), gas::noise_study_to_csv(r));
  emit(out_path(cfg, stem + ".json"), gas::noise_study_to_json(r));
}

void run_ebola(const KeyValueConfig& cfg) {
  gas::EbolaConfig e;
  e.as_samples = get_size(cfg, "as_samples", e.as_samples);
  e.h = cfg.get_double("h", e.h);
  e.m1 = get_size(cfg, "m1", e.m1);
  e.m2 = get_size(cfg, "m2", e.m2);
  e.seed = cfg.get_uint("seed", 0);
  e.execution = execution_of(cfg);
  const gas::EbolaReport r = gas::ebola_experiment(e);
  const std::string stem = gas::output_stem("ebola", "table", e.seed);
  emit(out_path(cfg, stem + ".csv"), gas::ebola_to_csv(r));
  emit(out_path(cfg, stem + ".json"), gas::ebola_to_json(r));
  std::cout << gas::ebola_to_csv(r);
}

void run_sobol(const KeyValueConfig& cfg) {
  const auto model = gas::make_model(model_config(cfg, "ebola"));
  const std::uint64_t seed = cfg.get_uint("seed", 0);
  const gas::SobolIndexEstimates s = gas::upper_sobol_indices(*model, get_size(cfg, "samples", 100000), seed, execution_of(cfg));
  const std::string stem = gas::output_stem(model->name(), "sobol", seed);
  emit(out_path(cfg, stem + ".csv"), gas::sobol_indices_to_csv(s));
  emit(out_path(cfg, stem + ".json"), gas::sobol_indices_to_json(s, model->fingerprint(), seed));
}

void run_describe(const KeyValueConfig& cfg) {
  if (cfg.contains("model")) {
    std::cout << gas::make_model(model_config(cfg, ""))->describe().serialize();
    return;
  }
  std::printf("%-8s %10s %10s\n", "param", "low", "high");
  for (const auto& r : gas::ebola_liberia_ranges()) std::printf("%-8s %10.4f %10.4f\n", r.name, r.lo, r.hi);
}

void run_pce_fit(const KeyValueConfig& cfg) {
  const auto model = gas::make_model(model_config(cfg, "linear"));
  const std::uint64_t seed = cfg.get_uint("seed", 0);
  const std::size_t n = get_size(cfg, "n", 1000);
  const auto p = static_cast<unsigned>(get_size(cfg, "p", 3));
  gas::RngStream rng(seed, 0x900);
  const Eigen::MatrixXd X = gas::sample_matrix(model->input(), n, rng);
  Eigen::VectorXd y(X.rows());
  gas::RngStream eval(seed, 0x901);
  for (Eigen::Index i = 0; i < X.rows(); ++i) y(i) = model->evaluate(X.row(i).transpose(), eval);
  const gas::PceModel pce = gas::fit_pce(X, y, p, gas::basis_for(model->input().kind), execution_of(cfg));
  emit(out_path(cfg, gas::output_stem(model->name(), "pce", seed) + ".json"), gas::pce_to_json(pce));
  std::cout << "mean " << gas::format_double(pce.mean()) << ", training rms " << gas::format_double(pce.training_rms)
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global active subspace estimation and benchmarks"};
  app.require_subcommand(1);

  auto eig = make_verb(app, "eig", "spectrum and eigenvectors of the GAS or AS matrix");
  eig->flag("--method", "method", "gas | as");
  eig->flag("--m1", "m1", "GAS outer samples");
  eig->flag("--m2", "m2", "GAS companions per sample");
  eig->flag("--as-samples", "as_samples", "AS gradient samples");
  eig->flag("--increment", "h", "AS finite-difference increment");
  eig->flag("--companions", "companions", "shifted_sobol | independent");
  eig->flag("--reuse-base", "reuse_base", "reuse f(z) across coordinates (true/false)");
  eig->flag("--d1", "d1", "active dimension to record");

  auto gamma = make_verb(app, "gamma", "Gamma estimates along the eigenvectors, and d1");
  gamma->flag("--method", "method", "gas | as (source of U)");
  gamma->flag("--decomposition", "decomposition", "reuse U from a decomposition JSON");
  gamma->flag("--m1", "m1", "GAS outer samples for U");
  gamma->flag("--m2", "m2", "GAS companions for U");
  gamma->flag("--as-samples", "as_samples", "AS samples for U");
  gamma->flag("--increment", "h", "AS increment");
  gamma->flag("--gamma-m1", "gamma_m1", "outer samples for Gamma");
  gamma->flag("--gamma-m2", "gamma_m2", "Sobol' steps per outer sample");
  gamma->flag("--reuse-base", "reuse_base", "reuse f(z) (true/false)");

  auto summary = make_verb(app, "summary", "sufficient summary table");
  summary->flag("--method", "method", "gas | as");
  summary->flag("--m1", "m1", "GAS outer samples");
  summary->flag("--m2", "m2", "GAS companions");
  summary->flag("--as-samples", "as_samples", "AS samples");
  summary->flag("--increment", "h", "AS increment");
  summary->flag("--active", "active", "number of active coordinates, 1 or 2");
  summary->flag("--points", "points", "rows to emit (default 2000)");

  auto price = make_verb(app, "price", "run one estimator K times and report MSE and efficiency");
  price->flag("--estimator", "estimator", "mc | pce | as_pce | gas_pce");
  price->flag("--n", "n", "training points N");
  price->flag("--n1", "n1", "inner samples N1");
  price->flag("--m1", "m1", "GAS M1");
  price->flag("--m2", "m2", "GAS M2");
  price->flag("--as-samples", "as_samples", "AS samples");
  price->flag("--increment", "h", "AS increment");
  price->flag("--k", "k", "replications K");
  price->flag("--p", "p", "PCE degree");
  price->flag("--d1", "d1", "active dimension (0 = largest gap)");
  price->flag("--gamma-m1", "gamma_m1", "Gamma M1 when d1 is automatic");
  price->flag("--gamma-m2", "gamma_m2", "Gamma M2 when d1 is automatic");
  price->flag("--reference", "reference", "known mean; skips the reference run");
  price->flag("--reference-samples", "reference_samples", "MC samples for the reference (default 1e6)");
  price->flag("--clock", "clock", "wall | evaluations");

  auto heatmap = make_verb(app, "heatmap", "GAS_PCE / AS_PCE ratios over Heston (sigma_v, rho)");
  heatmap->flag("--sigmas", "sigmas", "comma-separated sigma_v values");
  heatmap->flag("--rhos", "rhos", "comma-separated rho values");
  heatmap->flag("--n", "n", "training points N");
  heatmap->flag("--n1", "n1", "inner samples N1");
  heatmap->flag("--m1", "m1", "GAS M1");
  heatmap->flag("--m2", "m2", "GAS M2");
  heatmap->flag("--as-samples", "as_samples", "AS samples (must equal M1*M2)");
  heatmap->flag("--increment", "h", "AS increment");
  heatmap->flag("--k", "k", "replications K");
  heatmap->flag("--p", "p", "PCE degree");
  heatmap->flag("--d1", "d1", "active dimension (0 = largest gap)");
  heatmap->flag("--reference-samples", "reference_samples", "MC samples per cell reference");
  heatmap->flag("--clock", "clock", "wall | evaluations");

  auto noise = make_verb(app, "noise-study", "AS vs GAS under additive noise on the quadratic model");
  noise->flag("--sigmas", "sigmas", "noise standard deviations");
  noise->flag("--hs", "hs", "AS increments");
  noise->flag("--splits", "splits", "GAS splits, e.g. 10000x1,1000x10");
  noise->flag("--as-samples", "as_samples", "AS samples");
  noise->flag("--gamma", "gamma", "report Gamma for GAS rows (true/false)");
  noise->flag("--gamma-m1", "gamma_m1", "Gamma M1");
  noise->flag("--gamma-m2", "gamma_m2", "Gamma M2");
  noise->flag("--ref-as-samples", "ref_as_samples", "AS reference samples");
  noise->flag("--ref-h", "ref_h", "AS reference increment");
  noise->flag("--ref-m1", "ref_m1", "GAS reference M1");
  noise->flag("--ref-m2", "ref_m2", "GAS reference M2");
  noise->flag("--reuse-base", "reuse_base", "reuse f(z) (true/false)");

  auto ebola = make_verb(app, "ebola", "AS and GAS spectra for the Ebola R0 model");
  ebola->flag("--as-samples", "as_samples", "AS samples");
  ebola->flag("--increment", "h", "AS increment");
  ebola->flag("--m1", "m1", "GAS M1");
  ebola->flag("--m2", "m2", "GAS M2");

  auto sobol = make_verb(app, "sobol-idx", "upper Sobol' indices");
  sobol->flag("--samples", "samples", "Monte Carlo pairs M");

  auto describe = make_verb(app, "describe", "print the Ebola parameter ranges or a model description", false);
  describe->flag("--model", "model", "model to describe");
  describe->app->add_option("--param", describe->params, "model parameter key=value (repeatable)");

  auto* pce = app.add_subcommand("pce", "polynomial chaos utilities");
  pce->require_subcommand(1);
  std::string dump_path;
  auto* dump = pce->add_subcommand("dump", "print a PCE model JSON");
  dump->add_option("file", dump_path, "PCE JSON file")->required();
  Verb fit;
  fit.app = pce->add_subcommand("fit", "fit a full-dimension PCE to a model and write it as JSON");
  fit.app->add_option("--config", fit.config_path, "key = value file supplying any flag");
  fit.flag("--seed", "seed", "seed (required)");
  fit.flag("--out", "output_dir", "output directory");
  fit.flag("--model", "model", "model name");
  fit.app->add_option("--param", fit.params, "model parameter key=value (repeatable)");
  fit.flag("--n", "n", "training points");
  fit.flag("--p", "p", "degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (eig->app->parsed()) run_eig(eig->gather());
    else if (gamma->app->parsed()) run_gamma(gamma->gather());
    else if (summary->app->parsed()) run_summary(summary->gather());
    else if (price->app->parsed()) run_price(price->gather());
    else if (heatmap->app->parsed()) run_heatmap(heatmap->gather());
    else if (noise->app->parsed()) run_noise_study(noise->gather());
    else if (ebola->app->parsed()) run_ebola(ebola->gather());
    else if (sobol->app->parsed()) run_sobol(sobol->gather());
    else if (describe->app->parsed()) run_describe(describe->gather());
    else if (dump->parsed()) std::cout << gas::pce_dump(gas::pce_from_json(gas::read_text_file(dump_path)));
    else if (fit.app->parsed()) run_pce_fit(fit.gather());
  } catch (const gas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
