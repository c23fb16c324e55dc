#include <algorithm>
#include <cmath>

#include "gas/error.hpp"
#include "gas/models.hpp"

namespace gas {

void HestonConfig::validate() const {
  if (!(maturity > 0.0)) throw ConfigError("heston: maturity T must be positive");
  if (dates < 1) throw ConfigError("heston: need at least one monitoring date");
  if (substeps < 1) throw ConfigError("heston: substeps must be >= 1");
  if (vol_paths < 1) throw ConfigError("heston: vol_paths must be >= 1");
  if (!(std::abs(rho) <= 1.0)) throw ConfigError("heston: |rho| must be <= 1");
  if (!(spot > 0.0)) throw ConfigError("heston: spot must be positive");
  if (!(strike >= 0.0)) throw ConfigError("heston: strike must be non-negative");
  if (!(v0 >= 0.0) || !(theta >= 0.0) || !(kappa >= 0.0) || !(sigma_v >= 0.0)) {
    throw ConfigError("heston: v0, theta, kappa, sigma_v must be non-negative");
  }
  if (strict_feller && !feller_satisfied()) {
    throw ConfigError("heston: Feller condition 2*kappa*theta > sigma_v^2 violated");
  }
}

HestonConfig heston_from_config(const KeyValueConfig& cfg) {
  HestonConfig h;
  h.spot = cfg.get_double("spot", h.spot);
  h.strike = cfg.get_double("strike", h.strike);
  h.rate = cfg.get_double("rate", h.rate);
  h.maturity = cfg.get_double("maturity", h.maturity);
  h.dates = static_cast<std::size_t>(cfg.get_int("dates", static_cast<std::int64_t>(h.dates)));
  h.v0 = cfg.get_double("v0", h.v0);
  h.kappa = cfg.get_double("kappa", h.kappa);
  h.theta = cfg.get_double("theta", h.theta);
  h.sigma_v = cfg.get_double("sigma_v", h.sigma_v);
  h.rho = cfg.get_double("rho", h.rho);
  h.vol_paths = static_cast<std::size_t>(cfg.get_int("vol_paths", static_cast<std::int64_t>(h.vol_paths)));
  h.substeps = static_cast<std::size_t>(cfg.get_int("substeps", static_cast<std::int64_t>(h.substeps)));
  h.strict_feller = cfg.get_bool("strict_feller", h.strict_feller);
  return h;
}

AsianHestonModel::AsianHestonModel(const HestonConfig& cfg)
    : ModelFunction({Marginal::StdNormal, cfg.dates}), cfg_(cfg) {
  cfg_.validate();
}

KeyValueConfig AsianHestonModel::describe() const {
  KeyValueConfig c;
  c.set("model", "heston");
  c.set("spot", cfg_.spot);
  c.set("strike", cfg_.strike);
  c.set("rate", cfg_.rate);
  c.set("maturity", cfg_.maturity);
  c.set("dates", static_cast<std::uint64_t>(cfg_.dates));
  c.set("v0", cfg_.v0);
  c.set("kappa", cfg_.kappa);
  c.set("theta", cfg_.theta);
  c.set("sigma_v", cfg_.sigma_v);
  c.set("rho", cfg_.rho);
  c.set("vol_paths", static_cast<std::uint64_t>(cfg_.vol_paths));
  c.set("substeps", static_cast<std::uint64_t>(cfg_.substeps));
  c.set("strict_feller", cfg_.strict_feller);
  return c;
}

namespace {

struct PathResult {
  double average = 0.0;   // mean_i S_{t_i}
  double terminal = 0.0;  // S_T
};

// One asset/variance path. W^1 increments over each monitoring interval are
// fixed by z; the substep increments are drawn from the Brownian bridge that
// ends at the prescribed value, so their sum reproduces z exactly.
PathResult simulate_path(const HestonConfig& c, const Eigen::VectorXd& z, RngStream& rng) {
  const double dt_date = c.maturity / static_cast<double>(c.dates);
  const auto m = c.substeps;
  const double dt = dt_date / static_cast<double>(m);
  const double sqrt_dt = std::sqrt(dt);
  const double rho_perp = std::sqrt(std::max(0.0, 1.0 - c.rho * c.rho));

  double s = c.spot;
  double v = c.v0;
  double sum = 0.0;
  for (std::size_t k = 0; k < c.dates; ++k) {
    double remaining = z(static_cast<Eigen::Index>(k)) * std::sqrt(dt_date);
    for (std::size_t j = 0; j < m; ++j) {
      const auto left = static_cast<double>(m - j);
      double dw1 = remaining;
      if (m - j > 1) dw1 = remaining / left + std::sqrt(dt * (left - 1.0) / left) * rng.normal();
      remaining -= dw1;
      // Full truncation: negative variance is clamped in drift and diffusion.
      const double vp = std::max(v, 0.0);
      s *= std::exp((c.rate - 0.5 * vp) * dt + std::sqrt(vp) * dw1);
      if (c.sigma_v > 0.0) {
        const double dw2 = c.rho * dw1 + rho_perp * sqrt_dt * rng.normal();
        v += c.kappa * (c.theta - vp) * dt + c.sigma_v * std::sqrt(vp) * dw2;
      } else {
        v += c.kappa * (c.theta - vp) * dt;
      }
    }
    sum += s;
  }
  return {sum / static_cast<double>(c.dates), s};
}

}  // namespace

AsianHestonModel::PathSummary AsianHestonModel::simulate(const Eigen::VectorXd& z, RngStream& rng) const {
  check_dimension(z);
  const double discount = std::exp(-cfg_.rate * cfg_.maturity);
  double payoff = 0.0;
  double average = 0.0;
  for (std::size_t p = 0; p < cfg_.vol_paths; ++p) {
    const PathResult r = simulate_path(cfg_, z, rng);
    payoff += std::max(r.average - cfg_.strike, 0.0);
    average += r.average;
  }
  const double n = static_cast<double>(cfg_.vol_paths);
  PathSummary out{discount * payoff / n, discount * average / n};
  if (!std::isfinite(out.price)) throw EvaluationError("heston: non-finite payoff");
  if (out.price < 0.0 || out.price > out.discounted_average * (1.0 + 1e-12)) {
    throw EvaluationError("heston: payoff outside [0, e^{-rT} mean(S)]");
  }
  return out;
}

double AsianHestonModel::evaluate(const Eigen::VectorXd& z, RngStream& rng) const {
  return simulate(z, rng).price;
}

double AsianHestonModel::discounted_terminal(const Eigen::VectorXd& z, RngStream& rng) const {
  check_dimension(z);
  return std::exp(-cfg_.rate * cfg_.maturity) * simulate_path(cfg_, z, rng).terminal;
}

}  // namespace gas
