#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gas/config.hpp"
#include "gas/sampling.hpp"

namespace gas {

/// Scalar model f(z) over a product input measure.
///
/// Models are immutable after construction and may be shared across threads.
/// Stochastic models draw their internal randomness from the `rng` argument;
/// deterministic models ignore it. With a fixed z and a fixed stream state the
/// output is deterministic.
class ModelFunction {
 public:
  explicit ModelFunction(InputDistribution input) : input_(input) {}
  virtual ~ModelFunction() = default;

  const InputDistribution& input() const noexcept { return input_; }
  std::size_t dimension() const noexcept { return input_.dimension; }

  virtual double evaluate(const Eigen::VectorXd& z, RngStream& rng) const = 0;

  /// True when repeated evaluations at the same z may differ.
  virtual bool stochastic() const { return false; }

  virtual std::string name() const = 0;

  /// Parameters as `key = value` pairs; round-trips through `make_model`.
  virtual KeyValueConfig describe() const = 0;

  /// Stable identifier of model and parameters (name plus FNV-1a digest).
  std::string fingerprint() const;

 protected:
  void check_dimension(const Eigen::VectorXd& z) const;

 private:
  InputDistribution input_;
};

using ModelPtr = std::shared_ptr<const ModelFunction>;

/// f(z) = a^T z.
class LinearModel final : public ModelFunction {
 public:
  LinearModel(Eigen::VectorXd a, Marginal marginal);
  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  std::string name() const override { return "linear"; }
  KeyValueConfig describe() const override;
  const Eigen::VectorXd& coefficients() const noexcept { return a_; }

 private:
  Eigen::VectorXd a_;
};

/// Wraps an arbitrary deterministic callable; handy for tests and scripting.
class FunctionModel final : public ModelFunction {
 public:
  using Fn = std::function<double(const Eigen::VectorXd&)>;
  FunctionModel(InputDistribution input, Fn fn, std::string label = "function");
  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  std::string name() const override { return label_; }
  KeyValueConfig describe() const override;

 private:
  Fn fn_;
  std::string label_;
};

// ---------------------------------------------------------------------------
// Quadratic form with additive Gaussian noise on [0,1]^d
// ---------------------------------------------------------------------------

struct QuadraticConfig {
  std::size_t dimension = 10;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  /// Diagonal of Lambda; empty means 10^{-(i-1)/2}, i = 1..d.
  std::vector<double> spectrum;
};

/// f(z) = 1/2 z^T A z + eps, eps ~ N(0, sigma^2), with A = Q Lambda Q^T.
///
/// Q is the orthogonal factor of a seeded Gaussian matrix, sign-normalized so
/// that the triangular factor has a positive diagonal.
class QuadraticNoiseModel final : public ModelFunction {
 public:
  explicit QuadraticNoiseModel(const QuadraticConfig& cfg);

  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  bool stochastic() const override { return sigma_ > 0.0; }
  std::string name() const override { return "quadratic"; }
  KeyValueConfig describe() const override;

  /// Noiseless part f_0(z).
  double noiseless(const Eigen::VectorXd& z) const;
  /// Exact gradient of f_0: A z.
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;

  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  const Eigen::MatrixXd& rotation() const noexcept { return q_; }
  const Eigen::VectorXd& spectrum() const noexcept { return lambda_; }
  double noise_sigma() const noexcept { return sigma_; }
  const QuadraticConfig& config() const noexcept { return cfg_; }

  /// Same model with a different noise level (A unchanged).
  QuadraticNoiseModel with_noise(double sigma) const;

 private:
  QuadraticConfig cfg_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd a_;
  double sigma_;
};

/// Orthogonal factor of the Householder QR of a seeded Gaussian matrix, with
/// columns flipped so the diagonal of R is positive.
Eigen::MatrixXd random_orthogonal(std::size_t d, RngStream& rng);

// ---------------------------------------------------------------------------
// Arithmetic Asian call under Heston volatility
// ---------------------------------------------------------------------------

struct HestonConfig {
  double spot = 100.0;        // S0
  double strike = 100.0;      // K
  double rate = 0.03;         // r
  double maturity = 1.0;      // T
  std::size_t dates = 10;     // d monitoring dates
  double v0 = 0.04;
  double kappa = 2.0;
  double theta = 0.04;
  double sigma_v = 0.09;
  double rho = 0.9;
  std::size_t vol_paths = 10;
  std::size_t substeps = 10;
  bool strict_feller = false;

  void validate() const;
  bool feller_satisfied() const noexcept { return 2.0 * kappa * theta > sigma_v * sigma_v; }
};

/// f(z) = E[ e^{-rT} max(mean_i S_{t_i} - K, 0) | W^1 increments = z sqrt(T/d) ].
///
/// The conditional expectation over the volatility driver is replaced by the
/// average over `vol_paths` simulated variance paths (full-truncation Euler).
/// Within a monitoring interval the W^1 path is filled in with a Brownian
/// bridge pinned to the supplied increment.
class AsianHestonModel final : public ModelFunction {
 public:
  struct PathSummary {
    double price = 0.0;                // the model output
    double discounted_average = 0.0;   // e^{-rT} * mean over paths of mean_i S_{t_i}
  };

  explicit AsianHestonModel(const HestonConfig& cfg);

  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  bool stochastic() const override { return cfg_.sigma_v > 0.0 && cfg_.vol_paths > 0; }
  std::string name() const override { return "heston"; }
  KeyValueConfig describe() const override;

  PathSummary simulate(const Eigen::VectorXd& z, RngStream& rng) const;

  /// e^{-rT} S_T along the supplied z (first inner path only); used by the
  /// martingale check.
  double discounted_terminal(const Eigen::VectorXd& z, RngStream& rng) const;

  const HestonConfig& config() const noexcept { return cfg_; }

 private:
  HestonConfig cfg_;
};

// ---------------------------------------------------------------------------
// Discontinuous ridge
// ---------------------------------------------------------------------------

/// f(z) = 1{theta^T z > 0} under standard-normal inputs.
class RidgeModel final : public ModelFunction {
 public:
  explicit RidgeModel(Eigen::VectorXd theta);
  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  std::string name() const override { return "ridge"; }
  KeyValueConfig describe() const override;
  const Eigen::VectorXd& theta() const noexcept { return theta_; }

 private:
  Eigen::VectorXd theta_;
};

// ---------------------------------------------------------------------------
// Ebola basic reproduction number
// ---------------------------------------------------------------------------

struct EbolaParams {
  double beta1, beta2, beta3, rho1, gamma1, gamma2, omega, psi;
  void validate() const;
};

struct ParameterRange {
  const char* name;
  double lo;
  double hi;
};

/// Liberia ranges, in the order beta1, beta2, beta3, rho1, gamma1, gamma2, omega, psi.
const std::array<ParameterRange, 8>& ebola_liberia_ranges();

double ebola_r0(const EbolaParams& p);

/// Affine map of z in (0,1)^8 onto the Liberia ranges.
EbolaParams ebola_params_from_unit_cube(const Eigen::VectorXd& z);

/// ebola_r0(ebola_params_from_unit_cube(z)).
double ebola_from_unit_cube(const Eigen::VectorXd& z);

class EbolaModel final : public ModelFunction {
 public:
  EbolaModel();
  double evaluate(const Eigen::VectorXd& z, RngStream& rng) const override;
  std::string name() const override { return "ebola"; }
  KeyValueConfig describe() const override;
};

// ---------------------------------------------------------------------------
// Construction from key = value configuration
// ---------------------------------------------------------------------------

/// Builds a model from a config whose `model` key is one of
/// quadratic, heston, ridge, ebola, linear.
ModelPtr make_model(const KeyValueConfig& cfg);

HestonConfig heston_from_config(const KeyValueConfig& cfg);
QuadraticConfig quadratic_from_config(const KeyValueConfig& cfg);

}  // namespace gas
