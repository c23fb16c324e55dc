#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gas/config.hpp"
#include "gas/models.hpp"
#include "gas/parallel.hpp"
#include "gas/subspace.hpp"

namespace gas {

enum class Estimator { MC, PCE, AS_PCE, GAS_PCE };

std::string to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

/// What "time" means in the efficiency metric. Wall time is the physical
/// measure; the evaluation count is reproducible bit for bit.
enum class ClockKind { Wall, Evaluations };

std::string to_string(ClockKind c);
ClockKind parse_clock(std::string_view name);

struct ExperimentConfig {
  KeyValueConfig model;  // `model = ...` plus its parameters
  Estimator estimator = Estimator::GAS_PCE;
  std::size_t n = 10000;   // training points (or MC sample size)
  std::size_t n1 = 1;      // inner samples of the conditional surrogate
  std::size_t m1 = 10000;  // GAS outer samples
  std::size_t m2 = 1;      // GAS companions per outer sample
  std::size_t as_samples = 10000;
  double h = 1e-3;
  std::size_t k = 40;      // replications
  unsigned p = 3;          // PCE degree
  std::size_t d1 = 0;      // 0: choose by the largest-gap rule
  std::size_t gamma_m1 = 1000;  // Gamma sample sizes when d1 is chosen automatically
  std::size_t gamma_m2 = 10;
  CompanionScheme companions = CompanionScheme::ShiftedSobol;
  bool reuse_base = true;
  std::uint64_t master_seed = 0;
  ClockKind clock = ClockKind::Wall;
  std::string output_dir = ".";
  Execution execution = Execution::Parallel;

  void validate() const;

  /// Reads every field from `key = value` pairs; keys prefixed `model.`
  /// (or the bare `model` key) form the model configuration.
  static ExperimentConfig from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
};

/// Rejects GAS/AS comparisons whose function-evaluation budgets differ,
/// i.e. M1*M2*(d+1) != M*(d+1).
void validate_equal_budget(std::size_t m1, std::size_t m2, std::size_t as_samples);

/// Model decorator that counts evaluations.
class CountingModel final : public ModelFunction {
 public:
  explicit CountingModel(ModelPtr inner);
  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  bool stochastic() const override { return inner_->stochastic(); }
  std::string name() const override { return inner_->name(); }
  KeyValueConfig describe() const override { return inner_->describe(); }
  std::uint64_t count() const noexcept { return count_.load(std::memory_order_relaxed); }

 private:
  ModelPtr inner_;
  mutable std::atomic<std::uint64_t> count_{0};
};

struct ReferenceValue {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Plain Monte Carlo mean of f over n input draws, with its standard error.
ReferenceValue reference_value(const ModelFunction& f, std::size_t n, std::uint64_t seed,
                               Execution ex = Execution::Parallel);

struct EstimatorResult {
  Estimator estimator = Estimator::MC;
  std::string model;           // fingerprint
  std::uint64_t seed = 0;
  std::vector<double> estimates;   // NaN for failed replications
  std::vector<std::string> failures;  // one message per failed replication
  double reference = 0.0;
  double reference_se = 0.0;
  std::size_t d1 = 0;          // subspace estimators only
  Eigen::VectorXd spectrum;    // normalized subspace spectrum, if any
  double wall_time = 0.0;      // seconds, everything included
  std::uint64_t evaluations = 0;
  ClockKind clock = ClockKind::Wall;
  double cost = 0.0;           // wall_time or evaluations, per `clock`
  double mse = 0.0;
  double efficiency = 0.0;     // 1 / (cost * mse); +inf when mse == 0
};

/// Runs K replications of the configured estimator against `reference`.
EstimatorResult run_estimator(const ExperimentConfig& cfg, const ReferenceValue& reference);
EstimatorResult run_estimator(const ExperimentConfig& cfg, const ModelPtr& model,
                              const ReferenceValue& reference);

/// (1/K) sum (E_i - truth)^2 over finite estimates; NaN when none is finite.
double mse(const std::vector<double>& estimates, double truth);

/// 1 / (time * mse), +inf when mse == 0.
double efficiency(double time, double mse);

// ---------------------------------------------------------------------------
// Heatmap over Heston (sigma_v, rho)
// ---------------------------------------------------------------------------

struct HeatmapConfig {
  ExperimentConfig base;  // estimator field is ignored
  std::vector<double> sigmas{0.01, 0.05, 0.1, 0.15, 0.2};
  std::vector<double> rhos{-0.99, -0.9, -0.5, 0.0, 0.5, 0.9, 0.99};
  std::size_t reference_samples = 1000000;
  bool enforce_equal_budget = true;
};

/// Heston parameters of the sweep: V0 = theta = 0.025, kappa = 3.
KeyValueConfig heatmap_base_model();

struct HeatmapCell {
  double sigma = 0.0;
  double rho = 0.0;
  ReferenceValue reference;
  double mse_gas = 0.0, mse_as = 0.0;
  double eff_gas = 0.0, eff_as = 0.0;
  double mse_ratio = 0.0, eff_ratio = 0.0;  // NaN when the cell failed
  std::string error;
};

struct HeatmapGrid {
  std::vector<double> sigma_values;
  std::vector<double> rho_values;
  Eigen::MatrixXd mse_ratio;  // sigma x rho
  Eigen::MatrixXd eff_ratio;
  std::vector<HeatmapCell> cells;  // sigma-major
};

HeatmapGrid heatmap_sweep(const HeatmapConfig& cfg);

// ---------------------------------------------------------------------------
// Noise study on the quadratic model
// ---------------------------------------------------------------------------

struct GasSplit {
  std::size_t m1;
  std::size_t m2;
};

struct NoiseStudyConfig {
  QuadraticConfig model;
  std::vector<double> sigmas{0.01, 0.1, 1.0};
  std::vector<double> hs{1e-1, 1e-3, 1e-5};
  std::vector<GasSplit> splits{{10000, 1}, {1000, 10}, {100, 100}};
  std::size_t as_samples = 10000;
  bool compute_gamma = true;
  std::size_t gamma_m1 = 10000;
  std::size_t gamma_m2 = 10;
  std::size_t ref_as_samples = 100000;
  double ref_h = 1e-6;
  std::size_t ref_m1 = 100000;
  std::size_t ref_m2 = 10;
  bool reuse_base = true;
  bool enforce_equal_budget = true;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;
};

struct NoiseStudyRow {
  std::string method;  // "AS", "GAS", "AS-ref", "GAS-ref"
  double sigma = 0.0;
  double h = 0.0;      // AS only
  std::size_t m1 = 0;  // AS: sample count
  std::size_t m2 = 0;
  Eigen::VectorXd spectrum;  // normalized eigenvalues (AS) or Gamma (GAS)
  Eigen::VectorXd u1, u2;
  double cos1 = 1.0;   // |cosine| with the reference eigenvectors
  double cos2 = 1.0;
};

struct NoiseStudyReport {
  std::vector<NoiseStudyRow> rows;  // references first
};

NoiseStudyReport noise_study(const NoiseStudyConfig& cfg);

// ---------------------------------------------------------------------------
// Ebola R0 comparison
// ---------------------------------------------------------------------------

struct EbolaConfig {
  std::size_t as_samples = 10000;
  double h = 1e-3;
  std::size_t m1 = 1000;
  std::size_t m2 = 10;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;
};

struct EbolaReport {
  SubspaceDecomposition as;
  SubspaceDecomposition gas;
};

EbolaReport ebola_experiment(const EbolaConfig& cfg);

/// |a.b| / (|a| |b|).
double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace gas
