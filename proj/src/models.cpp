#include "gas/models.hpp"

#include <cmath>
#include <cstdio>

#include "gas/error.hpp"

namespace gas {

namespace {

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string ModelFunction::fingerprint() const {
  KeyValueConfig cfg = describe();
  cfg.set("input", to_string(input_.kind));
  cfg.set("dimension", static_cast<std::uint64_t>(input_.dimension));
  return name() + "-" + hex64(fnv1a64(cfg.serialize()));
}

void ModelFunction::check_dimension(const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != input_.dimension) {
    throw DomainError(name() + ": expected input of dimension " + std::to_string(input_.dimension) +
                      ", got " + std::to_string(z.size()));
  }
}

// --- LinearModel -----------------------------------------------------------

LinearModel::LinearModel(Eigen::VectorXd a, Marginal marginal)
    : ModelFunction({marginal, static_cast<std::size_t>(a.size())}), a_(std::move(a)) {
  if (a_.size() == 0) throw ConfigError("linear model needs at least one coefficient");
}

double LinearModel::evaluate(const Eigen::VectorXd& z, RngStream&) const {
  check_dimension(z);
  return a_.dot(z);
}

KeyValueConfig LinearModel::describe() const {
  KeyValueConfig cfg;
  cfg.set("model", "linear");
  cfg.set("a", to_std(a_));
  cfg.set("input", to_string(input().kind));
  return cfg;
}

// --- FunctionModel ---------------------------------------------------------

FunctionModel::FunctionModel(InputDistribution input, Fn fn, std::string label)
    : ModelFunction(input), fn_(std::move(fn)), label_(std::move(label)) {}

double FunctionModel::evaluate(const Eigen::VectorXd& z, RngStream&) const {
  check_dimension(z);
  return fn_(z);
}

KeyValueConfig FunctionModel::describe() const {
  KeyValueConfig cfg;
  cfg.set("model", label_);
  return cfg;
}

// --- QuadraticNoiseModel ---------------------------------------------------

Eigen::MatrixXd random_orthogonal(std::size_t d, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

QuadraticNoiseModel::QuadraticNoiseModel(const QuadraticConfig& cfg)
    : ModelFunction({Marginal::UnitUniform, cfg.dimension}), cfg_(cfg), sigma_(cfg.noise_sigma) {
  if (cfg.dimension == 0) throw ConfigError("quadratic model: dimension must be positive");
  if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("quadratic model: noise_sigma must be >= 0");
  const auto n = static_cast<Eigen::Index>(cfg.dimension);
  lambda_.resize(n);
  if (cfg.spectrum.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) lambda_(i) = std::pow(10.0, -static_cast<double>(i) / 2.0);
  } else {
    if (cfg.spectrum.size() != cfg.dimension) {
      throw ConfigError("quadratic model: spectrum length must equal dimension");
    }
    lambda_ = to_eigen(cfg.spectrum);
    if ((lambda_.array() <= 0.0).any()) {
      throw ConfigError("quadratic model: spectrum must be strictly positive");
    }
  }
  RngStream rng(cfg.seed, 0x51);
  q_ = random_orthogonal(cfg.dimension, rng);
  a_ = q_ * lambda_.asDiagonal() * q_.transpose();
  a_ = 0.5 * (a_ + a_.transpose()).eval();
}

double QuadraticNoiseModel::noiseless(const Eigen::VectorXd& z) const {
  check_dimension(z);
  return 0.5 * z.dot(a_ * z);
}

Eigen::VectorXd QuadraticNoiseModel::gradient(const Eigen::VectorXd& z) const {
  check_dimension(z);
  return a_ * z;
}

double QuadraticNoiseModel::evaluate(const Eigen::VectorXd& z, RngStream& rng) const {
  const double f0 = noiseless(z);
  return sigma_ > 0.0 ? f0 + sigma_ * rng.normal() : f0;
}

QuadraticNoiseModel QuadraticNoiseModel::with_noise(double sigma) const {
  QuadraticConfig cfg = cfg_;
  cfg.noise_sigma = sigma;
  return QuadraticNoiseModel(cfg);
}

KeyValueConfig QuadraticNoiseModel::describe() const {
  KeyValueConfig cfg;
  cfg.set("model", "quadratic");
  cfg.set("dimension", static_cast<std::uint64_t>(cfg_.dimension));
  cfg.set("noise_sigma", cfg_.noise_sigma);
  cfg.set("matrix_seed", cfg_.seed);
  cfg.set("spectrum", to_std(lambda_));
  return cfg;
}

// --- RidgeModel ------------------------------------------------------------

RidgeModel::RidgeModel(Eigen::VectorXd theta)
    : ModelFunction({Marginal::StdNormal, static_cast<std::size_t>(theta.size())}),
      theta_(std::move(theta)) {
  if (theta_.size() == 0 || theta_.squaredNorm() == 0.0) {
    throw ConfigError("ridge model: theta must be nonzero");
  }
}

double RidgeModel::evaluate(const Eigen::VectorXd& z, RngStream&) const {
  check_dimension(z);
  return theta_.dot(z) > 0.0 ? 1.0 : 0.0;
}

KeyValueConfig RidgeModel::describe() const {
  KeyValueConfig cfg;
  cfg.set("model", "ridge");
  cfg.set("theta", to_std(theta_));
  return cfg;
}

// --- Ebola -----------------------------------------------------------------

const std::array<ParameterRange, 8>& ebola_liberia_ranges() {
  static const std::array<ParameterRange, 8> ranges = {{
      {"beta1", 0.1, 0.4},
      {"beta2", 0.1, 0.4},
      {"beta3", 0.05, 0.2},
      {"rho1", 0.41, 1.0},
      {"gamma1", 0.0276, 0.1702},
      {"gamma2", 0.081, 0.21},
      {"omega", 0.25, 0.5},
      {"psi", 0.0833, 0.7},
  }};
  return ranges;
}

void EbolaParams::validate() const {
  const double all[] = {beta1, beta2, beta3, rho1, gamma1, gamma2, omega, psi};
  for (double x : all) {
    if (!(x > 0.0)) throw DomainError("ebola parameters must be strictly positive");
  }
}

double ebola_r0(const EbolaParams& p) {
  if (!(p.gamma1 + p.psi > 0.0) || !(p.omega > 0.0) || !(p.gamma2 > 0.0)) {
    throw DomainError("ebola_r0: non-positive denominator");
  }
  return (p.beta1 + p.beta2 * p.rho1 * p.gamma1 / p.omega + p.beta3 * p.psi / p.gamma2) /
         (p.gamma1 + p.psi);
}

EbolaParams ebola_params_from_unit_cube(const Eigen::VectorXd& z) {
  if (z.size() != 8) throw DomainError("ebola model expects an 8-vector");
  for (Eigen::Index i = 0; i < 8; ++i) {
    if (!(z(i) > 0.0 && z(i) < 1.0)) {
      throw DomainError("ebola model: input coordinate " + std::to_string(i) +
                        " outside the open unit cube");
    }
  }
  const auto& r = ebola_liberia_ranges();
  double p[8];
  for (int i = 0; i < 8; ++i) p[i] = r[i].lo + (r[i].hi - r[i].lo) * z(i);
  return {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]};
}

double ebola_from_unit_cube(const Eigen::VectorXd& z) {
  return ebola_r0(ebola_params_from_unit_cube(z));
}

EbolaModel::EbolaModel() : ModelFunction({Marginal::UnitUniform, 8}) {}

double EbolaModel::evaluate(const Eigen::VectorXd& z, RngStream&) const {
  return ebola_from_unit_cube(z);
}

KeyValueConfig EbolaModel::describe() const {
  KeyValueConfig cfg;
  cfg.set("model", "ebola");
  for (const auto& r : ebola_liberia_ranges()) {
    cfg.set(std::string("range.") + r.name, std::vector<double>{r.lo, r.hi});
  }
  return cfg;
}

// --- factory ---------------------------------------------------------------

QuadraticConfig quadratic_from_config(const KeyValueConfig& cfg) {
  QuadraticConfig q;
  q.dimension = static_cast<std::size_t>(cfg.get_int("dimension", 10));
  q.noise_sigma = cfg.get_double("noise_sigma", 0.0);
  q.seed = cfg.get_uint("matrix_seed", 1);
  q.spectrum = cfg.get_doubles("spectrum", {});
  return q;
}

ModelPtr make_model(const KeyValueConfig& cfg) {
  const std::string kind = cfg.get_string("model");
  if (kind == "quadratic") return std::make_shared<QuadraticNoiseModel>(quadratic_from_config(cfg));
  if (kind == "heston") return std::make_shared<AsianHestonModel>(heston_from_config(cfg));
  if (kind == "ebola") return std::make_shared<EbolaModel>();
  if (kind == "ridge") {
    if (cfg.contains("theta")) return std::make_shared<RidgeModel>(to_eigen(cfg.get_doubles("theta")));
    // Random direction theta ~ N(0, I_d) from theta_seed.
    const auto d = static_cast<std::size_t>(cfg.get_int("dimension", 10));
    RngStream rng(cfg.get_uint("theta_seed", 1), 0x7e);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
    for (auto& t : theta) t = rng.normal();
    return std::make_shared<RidgeModel>(theta);
  }
  if (kind == "linear") {
    return std::make_shared<LinearModel>(to_eigen(cfg.get_doubles("a")),
                                         parse_marginal(cfg.get_string("input", "std_normal")));
  }
  throw ConfigError("unknown model '" + kind + "'");
}

}  // namespace gas
