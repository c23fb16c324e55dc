#include "gas/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gas/error.hpp"
#include "gas/pce.hpp"

namespace gas {

namespace {

constexpr std::uint64_t kTagReference = 0x600;
constexpr std::uint64_t kTagReplication = 0x700;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent sub-seeds of a master seed.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t purpose) {
  return mix64(master ^ mix64(purpose + 0x9E3779B97F4A7C15ull));
}

enum SeedPurpose : std::uint64_t {
  kSeedGas = 1,
  kSeedAs = 2,
  kSeedGamma = 3,
  kSeedCell = 4,
  kSeedCellReference = 5,
  kSeedNoiseRow = 6,
  kSeedNoiseRefAs = 7,
  kSeedNoiseRefGas = 8,
  kSeedNoiseGamma = 9,
};

Execution parse_execution(const std::string& s) {
  if (s == "parallel") return Execution::Parallel;
  if (s == "serial") return Execution::Serial;
  throw ConfigError("execution must be 'serial' or 'parallel', got '" + s + "'");
}

std::size_t get_size(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

Eigen::VectorXd column_or_zero(const Eigen::MatrixXd& u, Eigen::Index j) {
  return j < u.cols() ? Eigen::VectorXd(u.col(j)) : Eigen::VectorXd::Zero(u.rows());
}

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::MC: return "mc";
    case Estimator::PCE: return "pce";
    case Estimator::AS_PCE: return "as_pce";
    case Estimator::GAS_PCE: return "gas_pce";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "mc") return Estimator::MC;
  if (name == "pce") return Estimator::PCE;
  if (name == "as_pce") return Estimator::AS_PCE;
  if (name == "gas_pce") return Estimator::GAS_PCE;
  throw ConfigError("unknown estimator '" + std::string(name) + "' (mc, pce, as_pce, gas_pce)");
}

std::string to_string(ClockKind c) { return c == ClockKind::Wall ? "wall" : "evaluations"; }

ClockKind parse_clock(std::string_view name) {
  if (name == "wall") return ClockKind::Wall;
  if (name == "evaluations") return ClockKind::Evaluations;
  throw ConfigError("clock must be 'wall' or 'evaluations'");
}

// --- configuration ---------------------------------------------------------

void ExperimentConfig::validate() const {
  if (k < 1) throw ConfigError("K (replications) must be >= 1");
  if (n < 1 || n1 < 1) throw ConfigError("N and N1 must be >= 1");
  if (estimator == Estimator::GAS_PCE) {
    if (m1 < 1 || m2 < 1) throw ConfigError("GAS_PCE needs M1, M2 >= 1");
  }
  if (estimator == Estimator::AS_PCE) {
    if (as_samples < 1) throw ConfigError("AS_PCE needs at least one gradient sample");
    if (!(h > 0.0)) throw ConfigError("AS_PCE needs h > 0");
  }
  if ((estimator == Estimator::GAS_PCE || estimator == Estimator::AS_PCE) && d1 == 0 &&
      (gamma_m1 < 1 || gamma_m2 < 1)) {
    throw ConfigError("automatic d1 needs gamma_m1, gamma_m2 >= 1");
  }
  if (!model.contains("model")) throw ConfigError("experiment config lacks a model");
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
  ExperimentConfig e;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "model") {
      e.model.set("model", value);
    } else if (key.rfind("model.", 0) == 0) {
      e.model.set(key.substr(6), value);
    }
  }
  e.estimator = parse_estimator(cfg.get_string("estimator", to_string(e.estimator)));
  e.n = get_size(cfg, "n", e.n);
  e.n1 = get_size(cfg, "n1", e.n1);
  e.m1 = get_size(cfg, "m1", e.m1);
  e.m2 = get_size(cfg, "m2", e.m2);
  e.as_samples = get_size(cfg, "as_samples", e.as_samples);
  e.h = cfg.get_double("h", e.h);
  e.k = get_size(cfg, "k", e.k);
  e.p = static_cast<unsigned>(get_size(cfg, "p", e.p));
  e.d1 = get_size(cfg, "d1", e.d1);
  e.gamma_m1 = get_size(cfg, "gamma_m1", e.gamma_m1);
  e.gamma_m2 = get_size(cfg, "gamma_m2", e.gamma_m2);
  e.companions = parse_companion_scheme(cfg.get_string("companions", to_string(e.companions)));
  e.reuse_base = cfg.get_bool("reuse_base", e.reuse_base);
  e.master_seed = cfg.get_uint("seed", e.master_seed);
  e.clock = parse_clock(cfg.get_string("clock", to_string(e.clock)));
  e.output_dir = cfg.get_string("output_dir", e.output_dir);
  e.execution = parse_execution(cfg.get_string("execution", "parallel"));
  return e;
}

KeyValueConfig ExperimentConfig::to_config() const {
  KeyValueConfig c;
  for (const auto& [key, value] : model.items()) c.set(key == "model" ? key : "model." + key, value);
  c.set("estimator", to_string(estimator));
  c.set("n", static_cast<std::uint64_t>(n));
  c.set("n1", static_cast<std::uint64_t>(n1));
  c.set("m1", static_cast<std::uint64_t>(m1));
  c.set("m2", static_cast<std::uint64_t>(m2));
  c.set("as_samples", static_cast<std::uint64_t>(as_samples));
  c.set("h", h);
  c.set("k", static_cast<std::uint64_t>(k));
  c.set("p", static_cast<std::uint64_t>(p));
  c.set("d1", static_cast<std::uint64_t>(d1));
  c.set("gamma_m1", static_cast<std::uint64_t>(gamma_m1));
  c.set("gamma_m2", static_cast<std::uint64_t>(gamma_m2));
  c.set("companions", to_string(companions));
  c.set("reuse_base", reuse_base);
  c.set("seed", master_seed);
  c.set("clock", to_string(clock));
  c.set("output_dir", output_dir);
  c.set("execution", execution == Execution::Serial ? "serial" : "parallel");
  return c;
}

void validate_equal_budget(std::size_t m1, std::size_t m2, std::size_t as_samples) {
  if (m1 * m2 != as_samples) {
    throw ConfigError("unequal evaluation budgets: GAS uses M1*M2 = " + std::to_string(m1 * m2) +
                      " base points, AS uses M = " + std::to_string(as_samples));
  }
}

// --- counting decorator ----------------------------------------------------

CountingModel::CountingModel(ModelPtr inner) : ModelFunction(inner->input()), inner_(std::move(inner)) {}

double CountingModel::evaluate(const Eigen::VectorXd& z, RngStream& rng) const {
  count_.fetch_add(1, std::memory_order_relaxed);
  return inner_->evaluate(z, rng);
}

// --- estimators ------------------------------------------------------------

ReferenceValue reference_value(const ModelFunction& f, std::size_t n, std::uint64_t seed, Execution ex) {
  if (n < 2) throw ConfigError("reference_value needs at least two samples");
  RngStream base(seed, kTagReference);
  const Eigen::MatrixXd Z = sample_matrix(f.input(), n, base);
  const RngStream eval_root(seed, kTagReference + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for_each_index(n, ex, [&](std::size_t i) {
    RngStream eval = eval_root.derive(i);
    const auto r = static_cast<Eigen::Index>(i);
    y(r) = f.evaluate(Z.row(r).transpose(), eval);
  });
  ReferenceValue out;
  out.value = y.mean();
  const double var = (y.array() - out.value).square().sum() / static_cast<double>(n - 1);
  out.std_error = std::sqrt(var / static_cast<double>(n));
  out.samples = n;
  out.seed = seed;
  return out;
}

double mse(const std::vector<double>& estimates, double truth) {
  double acc = 0.0;
  std::size_t count = 0;
  for (double e : estimates) {
    if (!std::isfinite(e)) continue;
    acc += (e - truth) * (e - truth);
    ++count;
  }
  return count ? acc / static_cast<double>(count) : kNaN;
}

double efficiency(double time, double mse_value) {
  if (std::isnan(mse_value) || std::isnan(time)) return kNaN;
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (time * mse_value);
}

EstimatorResult run_estimator(const ExperimentConfig& cfg, const ReferenceValue& reference) {
  cfg.validate();
  return run_estimator(cfg, make_model(cfg.model), reference);
}

EstimatorResult run_estimator(const ExperimentConfig& cfg, const ModelPtr& model, const ReferenceValue& reference) {
  cfg.validate();
  const auto counting = std::make_shared<CountingModel>(model);
  const ModelFunction& f = *counting;

  EstimatorResult out;
  out.estimator = cfg.estimator;
  out.model = model->fingerprint();
  out.seed = cfg.master_seed;
  out.reference = reference.value;
  out.reference_se = reference.std_error;
  out.clock = cfg.clock;
  out.estimates.assign(cfg.k, kNaN);

  const auto start = std::chrono::steady_clock::now();

  // Subspace estimators share one decomposition across replications.
  SubspaceDecomposition decomp;
  std::string setup_error;
  const bool subspace = cfg.estimator == Estimator::AS_PCE || cfg.estimator == Estimator::GAS_PCE;
  if (subspace) {
    try {
      if (f.input().kind != Marginal::StdNormal) {
        throw UnsupportedError("subspace estimators need standard-normal inputs");
      }
      if (cfg.estimator == Estimator::GAS_PCE) {
        GasConfig g;
        g.m1 = cfg.m1;
        g.m2 = cfg.m2;
        g.seed = sub_seed(cfg.master_seed, kSeedGas);
        g.companions = cfg.companions;
        g.reuse_base = cfg.reuse_base;
        g.execution = cfg.execution;
        decomp = decompose(assemble_bhat(f, g));
        if (cfg.d1 == 0) {
          GasConfig gg = g;
          gg.m1 = cfg.gamma_m1;
          gg.m2 = cfg.gamma_m2;
          gg.seed = sub_seed(cfg.master_seed, kSeedGamma);
          decomp.set_active_dimension(select_d1(estimate_gamma(f, decomp.U, gg).gammas));
        }
      } else {
        AsConfig a;
        a.samples = cfg.as_samples;
        a.h = cfg.h;
        a.seed = sub_seed(cfg.master_seed, kSeedAs);
        a.execution = cfg.execution;
        decomp = as_gradient_matrix(f, a).decomposition;
        if (cfg.d1 == 0) decomp.set_active_dimension(select_d1(decomp.lambdas));
      }
      if (cfg.d1 != 0) decomp.set_active_dimension(cfg.d1);
      out.d1 = decomp.d1;
      out.spectrum = decomp.normalized();
    } catch (const Error& e) {
      setup_error = e.what();
    }
  }

  const RngStream rep_root(cfg.master_seed, kTagReplication);
  for (std::size_t l = 0; l < cfg.k; ++l) {
    if (!setup_error.empty()) {
      out.failures.push_back("replication " + std::to_string(l) + ": " + setup_error);
      continue;
    }
    try {
      RngStream points_rng = rep_root.derive(2 * l);
      const RngStream eval_root = rep_root.derive(2 * l + 1);
      const std::size_t n = cfg.n;
      Eigen::VectorXd y(static_cast<Eigen::Index>(n));
      Eigen::MatrixXd X;
      if (subspace) {
        X = sample_matrix({Marginal::StdNormal, decomp.d1}, n, points_rng);
        for_each_index(n, cfg.execution, [&](std::size_t i) {
          RngStream eval = eval_root.derive(i);
          const auto r = static_cast<Eigen::Index>(i);
          y(r) = conditional_surrogate_eval(f, decomp, X.row(r).transpose(), cfg.n1, eval);
        });
      } else {
        X = sample_matrix(f.input(), n, points_rng);
        for_each_index(n, cfg.execution, [&](std::size_t i) {
          RngStream eval = eval_root.derive(i);
          const auto r = static_cast<Eigen::Index>(i);
          y(r) = f.evaluate(X.row(r).transpose(), eval);
        });
      }
      double estimate = 0.0;
      if (cfg.estimator == Estimator::MC) {
        estimate = y.mean();
      } else {
        const PceBasis basis = subspace ? PceBasis::Hermite : basis_for(f.input().kind);
        estimate = fit_pce(X, y, cfg.p, basis, cfg.execution).mean();
      }
      out.estimates[l] = estimate;
    } catch (const Error& e) {
      out.failures.push_back("replication " + std::to_string(l) + ": " + e.what());
    }
  }

  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.evaluations = counting->count();
  out.cost = cfg.clock == ClockKind::Wall ? out.wall_time : static_cast<double>(out.evaluations);
  out.mse = mse(out.estimates, reference.value);
  out.efficiency = efficiency(out.cost, out.mse);
  return out;
}

// --- heatmap ---------------------------------------------------------------

KeyValueConfig heatmap_base_model() {
  KeyValueConfig c;
  c.set("model", "heston");
  c.set("v0", 0.025);
  c.set("theta", 0.025);
  c.set("kappa", 3.0);
  return c;
}

HeatmapGrid heatmap_sweep(const HeatmapConfig& cfg) {
  if (cfg.sigmas.empty() || cfg.rhos.empty()) throw ConfigError("heatmap axes must be non-empty");
  if (cfg.enforce_equal_budget) validate_equal_budget(cfg.base.m1, cfg.base.m2, cfg.base.as_samples);
  HeatmapGrid grid;
  grid.sigma_values = cfg.sigmas;
  grid.rho_values = cfg.rhos;
  const auto ns = static_cast<Eigen::Index>(cfg.sigmas.size());
  const auto nr = static_cast<Eigen::Index>(cfg.rhos.size());
  grid.mse_ratio = Eigen::MatrixXd::Constant(ns, nr, kNaN);
  grid.eff_ratio = Eigen::MatrixXd::Constant(ns, nr, kNaN);

  std::uint64_t cell_index = 0;
  for (Eigen::Index a = 0; a < ns; ++a) {
    for (Eigen::Index b = 0; b < nr; ++b, ++cell_index) {
      HeatmapCell cell;
      cell.sigma = cfg.sigmas[static_cast<std::size_t>(a)];
      cell.rho = cfg.rhos[static_cast<std::size_t>(b)];
      cell.mse_gas = cell.mse_as = cell.eff_gas = cell.eff_as = kNaN;
      cell.mse_ratio = cell.eff_ratio = kNaN;
      try {
        ExperimentConfig e = cfg.base;
        e.model.set("sigma_v", cell.sigma);
        e.model.set("rho", cell.rho);
        e.master_seed = sub_seed(cfg.base.master_seed, kSeedCell + 16 * cell_index);
        const ModelPtr model = make_model(e.model);
        cell.reference = reference_value(*model, cfg.reference_samples,
                                         sub_seed(cfg.base.master_seed, kSeedCellReference + 16 * cell_index),
                                         e.execution);
        e.estimator = Estimator::GAS_PCE;
        const EstimatorResult gas = run_estimator(e, model, cell.reference);
        e.estimator = Estimator::AS_PCE;
        const EstimatorResult as = run_estimator(e, model, cell.reference);
        cell.mse_gas = gas.mse;
        cell.mse_as = as.mse;
        cell.eff_gas = gas.efficiency;
        cell.eff_as = as.efficiency;
        if (!gas.failures.empty()) cell.error = gas.failures.front();
        if (!as.failures.empty() && cell.error.empty()) cell.error = as.failures.front();
        cell.mse_ratio = gas.mse / as.mse;
        cell.eff_ratio = gas.efficiency / as.efficiency;
      } catch (const Error& err) {
        cell.error = err.what();
      }
      if (!(std::isfinite(cell.mse_ratio) && cell.mse_ratio > 0.0)) cell.mse_ratio = kNaN;
      if (!(std::isfinite(cell.eff_ratio) && cell.eff_ratio > 0.0)) cell.eff_ratio = kNaN;
      grid.mse_ratio(a, b) = cell.mse_ratio;
      grid.eff_ratio(a, b) = cell.eff_ratio;
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

// --- noise study -----------------------------------------------------------

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

NoiseStudyReport noise_study(const NoiseStudyConfig& cfg) {
  if (cfg.enforce_equal_budget) {
    for (const auto& s : cfg.splits) validate_equal_budget(s.m1, s.m2, cfg.as_samples);
  }
  QuadraticConfig clean_cfg = cfg.model;
  clean_cfg.noise_sigma = 0.0;
  const QuadraticNoiseModel clean(clean_cfg);

  auto gamma_spectrum = [&](const ModelFunction& f, const Eigen::MatrixXd& U, std::uint64_t seed) {
    GasConfig g;
    g.m1 = cfg.gamma_m1;
    g.m2 = cfg.gamma_m2;
    g.seed = seed;
    g.reuse_base = cfg.reuse_base;
    g.execution = cfg.execution;
    return estimate_gamma(f, U, g).normalized();
  };

  NoiseStudyReport report;

  AsConfig ref_as;
  ref_as.samples = cfg.ref_as_samples;
  ref_as.h = cfg.ref_h;
  ref_as.seed = sub_seed(cfg.seed, kSeedNoiseRefAs);
  ref_as.execution = cfg.execution;
  const SubspaceDecomposition as_ref = as_gradient_matrix(clean, ref_as).decomposition;
  NoiseStudyRow as_ref_row{"AS-ref", 0.0, cfg.ref_h, cfg.ref_as_samples, 0, as_ref.normalized(),
                           column_or_zero(as_ref.U, 0), column_or_zero(as_ref.U, 1), 1.0, 1.0};
  report.rows.push_back(as_ref_row);

  GasConfig ref_gas;
  ref_gas.m1 = cfg.ref_m1;
  ref_gas.m2 = cfg.ref_m2;
  ref_gas.seed = sub_seed(cfg.seed, kSeedNoiseRefGas);
  ref_gas.reuse_base = cfg.reuse_base;
  ref_gas.execution = cfg.execution;
  const SubspaceDecomposition gas_ref = decompose(assemble_bhat(clean, ref_gas));
  NoiseStudyRow gas_ref_row{"GAS-ref", 0.0, 0.0, cfg.ref_m1, cfg.ref_m2,
                            cfg.compute_gamma ? gamma_spectrum(clean, gas_ref.U, sub_seed(cfg.seed, kSeedNoiseGamma))
                                              : gas_ref.normalized(),
                            column_or_zero(gas_ref.U, 0), column_or_zero(gas_ref.U, 1), 1.0, 1.0};
  report.rows.push_back(gas_ref_row);

  std::uint64_t row_index = 0;
  for (double sigma : cfg.sigmas) {
    const QuadraticNoiseModel model = clean.with_noise(sigma);
    for (double h : cfg.hs) {
      AsConfig a;
      a.samples = cfg.as_samples;
      a.h = h;
      a.seed = sub_seed(cfg.seed, kSeedNoiseRow + 16 * row_index++);
      a.execution = cfg.execution;
      const SubspaceDecomposition dec = as_gradient_matrix(model, a).decomposition;
      NoiseStudyRow row{"AS", sigma, h, cfg.as_samples, 0, dec.normalized(), column_or_zero(dec.U, 0),
                        column_or_zero(dec.U, 1), 0.0, 0.0};
      row.cos1 = abs_cosine(row.u1, as_ref_row.u1);
      row.cos2 = abs_cosine(row.u2, as_ref_row.u2);
      report.rows.push_back(std::move(row));
    }
    for (const auto& split : cfg.splits) {
      GasConfig g;
      g.m1 = split.m1;
      g.m2 = split.m2;
      g.seed = sub_seed(cfg.seed, kSeedNoiseRow + 16 * row_index++);
      g.reuse_base = cfg.reuse_base;
      g.execution = cfg.execution;
      const SubspaceDecomposition dec = decompose(assemble_bhat(model, g));
      NoiseStudyRow row{"GAS", sigma, 0.0, split.m1, split.m2,
                        cfg.compute_gamma ? gamma_spectrum(model, dec.U, sub_seed(g.seed, kSeedNoiseGamma))
                                          : dec.normalized(),
                        column_or_zero(dec.U, 0), column_or_zero(dec.U, 1), 0.0, 0.0};
      row.cos1 = abs_cosine(row.u1, gas_ref_row.u1);
      row.cos2 = abs_cosine(row.u2, gas_ref_row.u2);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

// --- Ebola -----------------------------------------------------------------

EbolaReport ebola_experiment(const EbolaConfig& cfg) {
  const EbolaModel model;
  EbolaReport report;
  AsConfig a;
  a.samples = cfg.as_samples;
  a.h = cfg.h;
  a.seed = sub_seed(cfg.seed, kSeedAs);
  a.execution = cfg.execution;
  report.as = as_gradient_matrix(model, a).decomposition;

  GasConfig g;
  g.m1 = cfg.m1;
  g.m2 = cfg.m2;
  g.seed = sub_seed(cfg.seed, kSeedGas);
  g.execution = cfg.execution;
  report.gas = decompose(assemble_bhat(model, g));
  report.gas.m1 = g.m1;
  report.gas.m2 = g.m2;
  report.gas.seed = g.seed;
  report.gas.model = model.fingerprint();
  return report;
}

}  // namespace gas
