// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
//   gas_acceptance [--only N[,N...]] [--cli PATH] [--work DIR]
//
// --cli points at the gas executable; criterion 11 then reruns each CLI verb
// twice and compares the output files byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gas/bench.hpp"
#include "gas/error.hpp"
#include "gas/io.hpp"
#include "gas/models.hpp"
#include "gas/pce.hpp"
#include "gas/subspace.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::set<int> only;
  std::string cli;
  std::string work = (fs::temp_directory_path() / "gas_acceptance").string();
};

// Appends a runtime verdict to an outcome.
Outcome with_runtime(Outcome o, double secs, double limit) {
  const bool fast = secs < limit;
  o.detail += "; runtime " + fmt(secs, 3) + " s (limit " + fmt(limit) + " s)";
  if (!fast) o.detail += " TOO SLOW";
  o.pass = o.pass && fast;
  return o;
}

// Makes the dot product with `ref` non-negative.
Eigen::VectorXd align(const Eigen::VectorXd& u, const Eigen::VectorXd& ref) {
  return u.dot(ref) < 0.0 ? Eigen::VectorXd(-u) : u;
}

// 1. Linear exactness.
Outcome linear_exactness() {
  const auto t0 = Clock::now();
  gas::RngStream rng(2024, 1);
  Eigen::VectorXd a(10);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal();
  const gas::LinearModel f(a, gas::Marginal::StdNormal);

  gas::GasConfig cfg;
  cfg.m1 = 1000;
  cfg.m2 = 1;
  cfg.seed = 11;
  const auto dec = gas::decompose(gas::assemble_bhat(f, cfg));
  const double a2 = a.squaredNorm();
  const double lam_err = std::abs(dec.lambdas(0) - a2) / a2;
  const double tail = dec.lambdas.tail(9).maxCoeff();
  const double cos1 = gas::abs_cosine(dec.U.col(0), a);

  cfg.seed = 12;
  const auto g = gas::estimate_gamma(f, dec.U, cfg);
  double gamma_err = 0.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    const double expect = std::pow(dec.U.col(i).dot(a), 2);
    gamma_err = std::max(gamma_err, std::abs(g.gammas(i) - expect) / std::max(1.0, a2));
  }
  Outcome o;
  o.pass = lam_err <= 1e-10 && tail <= 1e-10 && cos1 >= 1.0 - 1e-10 && gamma_err <= 1e-10;
  o.detail = "rel|lambda1-|a|^2|=" + fmt(lam_err) + ", max lambda_{i>=2}=" + fmt(tail) +
             ", 1-cos=" + fmt(1.0 - cos1) + ", max Gamma err=" + fmt(gamma_err);
  return with_runtime(o, seconds_since(t0), 1.0);
}

// 2. C_11 for z^2 under N(0,1), independent companions.
Outcome closed_form_moment() {
  const auto t0 = Clock::now();
  const gas::FunctionModel f({gas::Marginal::StdNormal, 1}, [](const Eigen::VectorXd& z) { return z(0) * z(0); });
  gas::GasConfig cfg;
  cfg.m1 = 10000;
  cfg.m2 = 1;
  cfg.seed = 21;
  cfg.companions = gas::CompanionScheme::Independent;
  const Eigen::MatrixXd B = gas::assemble_bhat(f, cfg);
  const double c11 = B.row(0).squaredNorm();
  Outcome o;
  o.pass = std::abs(c11 - 2.0) <= 0.05 * 2.0;
  o.detail = "C11=" + fmt(c11, 6) + " (target 2 +- 5%, independent companions)";
  return with_runtime(o, seconds_since(t0), 1.0);
}

// 3. Ebola spectra and first eigenvectors.
Outcome ebola_table() {
  const Eigen::VectorXd gas_ev = (Eigen::VectorXd(8) << .797, .132, .040, .019, .008, .003, .001, 0).finished();
  const Eigen::VectorXd as_ev = (Eigen::VectorXd(8) << .769, .198, .018, .010, .004, 0, 0, 0).finished();
  const Eigen::VectorXd gas_u1 =
      (Eigen::VectorXd(8) << .464, .077, .490, .055, -.251, -.389, -.046, -.565).finished();
  const Eigen::VectorXd as_u1 =
      (Eigen::VectorXd(8) << .385, .062, .340, .043, -.252, -.298, -.038, -.759).finished();

  double worst_ev = 0.0, worst_u = 0.0, slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    gas::EbolaConfig cfg;
    cfg.seed = seed;
    cfg.m1 = 1000;
    cfg.m2 = 10;
    cfg.as_samples = 10000;
    cfg.h = 1e-3;
    const auto t0 = Clock::now();
    const auto r = gas::ebola_experiment(cfg);
    slowest = std::max(slowest, seconds_since(t0));
    worst_ev = std::max({worst_ev, (r.gas.normalized() - gas_ev).cwiseAbs().maxCoeff(),
                         (r.as.normalized() - as_ev).cwiseAbs().maxCoeff()});
    worst_u = std::max({worst_u, (align(r.gas.U.col(0), gas_u1) - gas_u1).cwiseAbs().maxCoeff(),
                        (align(r.as.U.col(0), as_u1) - as_u1).cwiseAbs().maxCoeff()});
  }
  Outcome o;
  o.pass = worst_ev <= 0.05 && worst_u <= 0.1;
  o.detail = "seeds 1..5: max eigenvalue dev=" + fmt(worst_ev) + " (tol .05), max u1 dev=" + fmt(worst_u) +
             " (tol .1)";
  return with_runtime(o, slowest, 30.0);
}

// 4. Gamma concentration on the Asian Heston model.
Outcome heston_gamma() {
  const auto t0 = Clock::now();
  const gas::AsianHestonModel f(gas::HestonConfig{});
  gas::GasConfig cfg;
  cfg.m1 = 2000;
  cfg.m2 = 10;
  cfg.seed = 41;
  const auto dec = gas::decompose(gas::assemble_bhat(f, cfg));
  cfg.seed = 42;
  const auto g = gas::estimate_gamma(f, dec.U, cfg);
  const Eigen::VectorXd ng = g.normalized();
  const std::size_t d1 = gas::select_d1(g.gammas);
  Outcome o;
  o.pass = ng(0) >= 0.95 && d1 == 1;
  o.detail = "normalized Gamma_1=" + fmt(ng(0)) + " (>= .95), Gamma_2=" + fmt(ng(1)) +
             ", select_d1=" + std::to_string(d1);
  return with_runtime(o, seconds_since(t0), 300.0);
}

// 5. GAS_PCE vs AS_PCE MSE on a reduced heatmap grid.
Outcome heatmap_direction() {
  const auto t0 = Clock::now();
  gas::HeatmapConfig cfg;
  cfg.base.model = gas::heatmap_base_model();
  cfg.base.n = 2000;
  cfg.base.n1 = 1;
  cfg.base.m1 = 10000;
  cfg.base.m2 = 1;
  cfg.base.as_samples = 10000;
  cfg.base.h = 1e-3;
  cfg.base.k = 10;
  cfg.base.p = 3;
  cfg.base.d1 = 1;
  cfg.base.master_seed = 51;
  cfg.sigmas = {0.05, 0.15};
  cfg.rhos = {-0.9, 0.0, 0.9};
  cfg.reference_samples = 1000000;
  const auto grid = gas::heatmap_sweep(cfg);
  int wins = 0;
  std::string cells;
  for (const auto& c : grid.cells) {
    if (c.mse_ratio < 1.0) ++wins;
    cells += " (" + fmt(c.sigma) + "," + fmt(c.rho) + ")=" + fmt(c.mse_ratio, 3);
  }
  Outcome o;
  o.pass = wins >= 5;
  o.detail = std::to_string(wins) + "/6 cells with mse_ratio < 1:" + cells;
  return with_runtime(o, seconds_since(t0), 1200.0);
}

// 6. Noise robustness: GAS vs best-h AS against no-noise references.
Outcome noise_robustness() {
  const auto t0 = Clock::now();
  int wins = 0;
  std::string trials;
  for (std::uint64_t t = 0; t < 10; ++t) {
    gas::NoiseStudyConfig cfg;
    cfg.model.dimension = 10;
    cfg.model.seed = 1000 + t;
    cfg.sigmas = {1.0};
    cfg.hs = {1e-1, 1e-3, 1e-5};
    cfg.splits = {{10000, 1}};
    cfg.as_samples = 10000;
    cfg.compute_gamma = false;
    cfg.seed = t;
    const auto rep = gas::noise_study(cfg);
    double best_as = 0.0, gas_cos = 0.0;
    for (const auto& row : rep.rows) {
      if (row.method == "AS") best_as = std::max(best_as, row.cos1);
      if (row.method == "GAS") gas_cos = row.cos1;
    }
    if (gas_cos > best_as) ++wins;
    trials += " " + fmt(gas_cos, 3) + "/" + fmt(best_as, 3);
  }
  Outcome o;
  o.pass = wins >= 8;
  o.detail = std::to_string(wins) + "/10 trials GAS ahead (GAS/bestAS cos1:" + trials + ")";
  return with_runtime(o, seconds_since(t0), 120.0);
}

// 7. Ridge direction recovery.
Outcome ridge_recovery() {
  const auto t0 = Clock::now();
  double worst = 1.0;
  for (std::size_t d : {10u, 20u}) {
    gas::RngStream rng(70 + d, 0);
    Eigen::VectorXd theta(d);
    for (std::size_t i = 0; i < d; ++i) theta(i) = rng.normal();
    const gas::RidgeModel f(theta);
    for (const auto& [m1, m2] : {std::pair<std::size_t, std::size_t>{10000, 1}, {1000, 10}, {100, 100}}) {
      gas::GasConfig cfg;
      cfg.m1 = m1;
      cfg.m2 = m2;
      cfg.seed = 700 + d + m2;
      const auto dec = gas::decompose(gas::assemble_bhat(f, cfg));
      worst = std::min(worst, gas::abs_cosine(dec.U.col(0), theta));
    }
  }
  Outcome o;
  o.pass = worst >= 0.95;
  o.detail = "min |cos(u1, theta)| over d in {10,20} and 3 splits=" + fmt(worst);
  return with_runtime(o, seconds_since(t0), 30.0);
}

// 8. PCE: Gram matrix, exact recovery, mean of w^2.
Outcome pce_suite() {
  const auto t0 = Clock::now();
  const std::size_t n_gram = 10000;
  const double gram_tol = 5.0 / std::sqrt(static_cast<double>(n_gram));
  double gram_dev = 0.0, gram_z = 0.0, recov = 0.0;
  for (const auto m : {gas::Marginal::StdNormal, gas::Marginal::UnitUniform}) {
    gas::RngStream rng(81, static_cast<std::uint64_t>(m));
    const Eigen::MatrixXd pts = gas::sample_matrix({m, 2}, n_gram, rng);
    // Degree 1 against the flat band; degree 3 entry by entry against five
    // of their own standard errors (psi_3^2 alone has variance 92).
    const gas::MultiIndexSet set(2, 1);
    const Eigen::MatrixXd psi = gas::build_design_matrix(pts, set, gas::basis_for(m));
    const Eigen::MatrixXd gram = psi.transpose() * psi / static_cast<double>(n_gram);
    gram_dev = std::max(gram_dev, (gram - Eigen::MatrixXd::Identity(set.size(), set.size())).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd psi3 = gas::build_design_matrix(pts, gas::MultiIndexSet(2, 3), gas::basis_for(m));
    for (Eigen::Index i = 0; i < psi3.cols(); ++i) {
      for (Eigen::Index j = i; j < psi3.cols(); ++j) {
        const Eigen::ArrayXd prod = psi3.col(i).array() * psi3.col(j).array();
        const double mean = prod.mean();
        const double se = std::sqrt((prod - mean).square().sum() / static_cast<double>(n_gram - 1) /
                                    static_cast<double>(n_gram));
        gram_z = std::max(gram_z, std::abs(mean - (i == j ? 1.0 : 0.0)) / se);
      }
    }

    const gas::MultiIndexSet set3(3, 3);
    const Eigen::MatrixXd x = gas::sample_matrix({m, 3}, 10 * set3.size(), rng);
    Eigen::VectorXd k(set3.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) k(i) = rng.normal();
    const Eigen::MatrixXd design = gas::build_design_matrix(x, set3, gas::basis_for(m));
    const auto fit = gas::fit_least_squares(design, design * k);
    recov = std::max({recov, (fit.coeffs - k).cwiseAbs().maxCoeff(), fit.residual_rms});
  }
  gas::RngStream rng(82, 0);
  const Eigen::MatrixXd w = gas::sample_matrix({gas::Marginal::StdNormal, 1}, 200, rng);
  const Eigen::VectorXd y = w.col(0).array().square();
  const double mean = gas::pce_mean(gas::fit_pce(w, y, 2, gas::PceBasis::Hermite));
  Outcome o;
  o.pass = gram_dev <= gram_tol && gram_z <= 5.0 && recov <= 1e-8 && std::abs(mean - 1.0) <= 1e-6;
  o.detail = "Gram p=1 dev=" + fmt(gram_dev) + " (tol " + fmt(gram_tol) + "), Gram p=3 max z=" + fmt(gram_z) +
             " (tol 5), recovery err=" + fmt(recov) +
             ", mean(w^2)-1=" + fmt(mean - 1.0);
  return with_runtime(o, seconds_since(t0), 10.0);
}

// 9. Var of the conditional surrogate scales as 1/N1.
Outcome surrogate_variance() {
  const auto t0 = Clock::now();
  const gas::QuadraticNoiseModel q(gas::QuadraticConfig{});
  const gas::FunctionModel f({gas::Marginal::StdNormal, q.dimension()},
                             [&q](const Eigen::VectorXd& z) { return q.noiseless(z); }, "quadratic-normal");
  gas::GasConfig cfg;
  cfg.m1 = 1000;
  cfg.m2 = 10;
  cfg.seed = 91;
  const auto dec = gas::decompose(gas::assemble_bhat(f, cfg), 1);
  const Eigen::VectorXd w1 = Eigen::VectorXd::Constant(1, 0.5);

  const std::size_t reps = 10000;
  std::vector<double> scaled;
  for (std::size_t n1 : {1u, 4u, 16u}) {
    const gas::RngStream root(92, n1);
    std::vector<double> g(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      gas::RngStream rng = root.derive(r);
      g[r] = gas::conditional_surrogate_eval(f, dec, w1, n1, rng);
    }
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(reps);
    double v = 0.0;
    for (double x : g) v += (x - m) * (x - m);
    v /= static_cast<double>(reps - 1);
    scaled.push_back(v * static_cast<double>(n1));
  }
  const double r4 = scaled[1] / scaled[0], r16 = scaled[2] / scaled[0];
  Outcome o;
  o.pass = std::abs(r4 - 1.0) <= 0.1 && std::abs(r16 - 1.0) <= 0.1;
  o.detail = "N1*Var / Var(N1=1): N1=4 -> " + fmt(r4) + ", N1=16 -> " + fmt(r16) + " (tol 10%)";
  return with_runtime(o, seconds_since(t0), 60.0);
}

// 10. Undivided C diagonal against upper Sobol' indices.
Outcome sobol_consistency() {
  const auto t0 = Clock::now();
  const gas::FunctionModel f({gas::Marginal::StdNormal, 2},
                             [](const Eigen::VectorXd& z) { return z(0) + z(1) * z(1); }, "z1+z2^2");
  const std::size_t m = 100000;
  gas::GasConfig cfg;
  cfg.m1 = m;
  cfg.m2 = 1;
  cfg.seed = 101;
  cfg.companions = gas::CompanionScheme::Independent;
  const auto diag = gas::bhat_diagonal(gas::assemble_bhat(f, cfg, gas::Quotient::Undivided), m, 1);
  const auto s = gas::upper_sobol_indices(f, m, 102);
  const double denom = 2.0 * s.variance;
  double worst = 0.0;
  std::string parts;
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double c = diag.values(i) / denom;
    const double se = std::hypot(diag.std_errors(i) / denom, s.std_errors(i));
    worst = std::max(worst, std::abs(c - s.indices(i)) / se);
    parts += " S" + std::to_string(i + 1) + ": C/2var=" + fmt(c) + " sobol=" + fmt(s.indices(i));
  }
  Outcome o;
  o.pass = worst <= 3.0;
  o.detail = "max |diff|/SE=" + fmt(worst) + " (tol 3);" + parts;
  return with_runtime(o, seconds_since(t0), 10.0);
}

// 11. Byte-identical reruns.
std::string produce_outputs() {
  std::string out;
  const auto ridge = gas::make_model(gas::KeyValueConfig::parse("model = ridge\ndimension = 6\ntheta_seed = 3\n"));
  gas::GasConfig g;
  g.m1 = 300;
  g.m2 = 3;
  g.seed = 5;
  auto dec = gas::decompose(gas::assemble_bhat(*ridge, g));
  dec.seed = 5;
  dec.model = ridge->fingerprint();
  out += gas::decomposition_to_json(dec) + gas::spectrum_to_csv(dec);
  const auto gam = gas::estimate_gamma(*ridge, dec.U, g);
  out += gas::gamma_to_json(gam) + gas::gamma_to_csv(gam);
  out += gas::summary_to_csv(gas::sufficient_summary(*ridge, dec, 2, 200, 6));

  gas::EbolaConfig e;
  e.seed = 7;
  e.m1 = 100;
  e.as_samples = 1000;
  const auto eb = gas::ebola_experiment(e);
  out += gas::ebola_to_json(eb) + gas::ebola_to_csv(eb);

  const auto s = gas::upper_sobol_indices(*ridge, 2000, 8);
  out += gas::sobol_indices_to_json(s, ridge->fingerprint(), 8) + gas::sobol_indices_to_csv(s);

  gas::ExperimentConfig pc;
  pc.model.set("model", "heston");
  pc.model.set("vol_paths", static_cast<std::uint64_t>(2));
  pc.n = 60;
  pc.m1 = 50;
  pc.m2 = 2;
  pc.as_samples = 100;
  pc.k = 3;
  pc.p = 2;
  pc.d1 = 1;
  pc.master_seed = 9;
  pc.clock = gas::ClockKind::Evaluations;
  const auto model = gas::make_model(pc.model);
  const auto ref = gas::reference_value(*model, 2000, 10);
  for (const auto est : {gas::Estimator::MC, gas::Estimator::PCE, gas::Estimator::AS_PCE, gas::Estimator::GAS_PCE}) {
    pc.estimator = est;
    const auto r = gas::run_estimator(pc, model, ref);
    out += gas::result_to_json(r, pc) + gas::result_to_csv(r);
  }

  gas::HeatmapConfig hc;
  hc.base = pc;
  hc.base.model = gas::heatmap_base_model();
  hc.base.model.set("vol_paths", static_cast<std::uint64_t>(2));
  hc.base.m1 = 50;
  hc.base.m2 = 2;
  hc.sigmas = {0.1};
  hc.rhos = {-0.5, 0.5};
  hc.reference_samples = 1000;
  const auto grid = gas::heatmap_sweep(hc);
  out += gas::heatmap_to_json(grid) + gas::heatmap_to_csv(grid);

  gas::NoiseStudyConfig nc;
  nc.model.dimension = 5;
  nc.sigmas = {0.5};
  nc.hs = {1e-2};
  nc.splits = {{200, 1}, {20, 10}};
  nc.as_samples = 200;
  nc.gamma_m1 = 100;
  nc.gamma_m2 = 2;
  nc.ref_as_samples = 500;
  nc.ref_m1 = 100;
  nc.ref_m2 = 5;
  nc.seed = 11;
  const auto ns = gas::noise_study(nc);
  out += gas::noise_study_to_json(ns) + gas::noise_study_to_csv(ns);
  return out;
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

// Runs every verb into `dir`; returns false if any command fails.
bool run_cli(const std::string& cli, const fs::path& dir, std::string& log) {
  const std::vector<std::string> verbs = {
      "eig --model quadratic --seed 1 --m1 200 --m2 3",
      "eig --model ebola --method as --seed 2 --as-samples 500",
      "gamma --model ridge --param dimension=6 --seed 3 --m1 200 --m2 2 --gamma-m1 100 --gamma-m2 3",
      "summary --model quadratic --seed 4 --m1 200 --m2 2 --active 2 --points 300",
      "price --model heston --param vol_paths=2 --seed 5 --estimator gas_pce --n 60 --m1 40 --m2 2 --k 3 --p 2 "
      "--d1 1 --reference-samples 500 --clock evaluations",
      "price --model heston --param vol_paths=2 --seed 5 --estimator as_pce --n 60 --as-samples 80 --k 3 --p 2 "
      "--d1 1 --reference-samples 500 --clock evaluations",
      "heatmap --param vol_paths=2 --seed 6 --sigmas 0.1 --rhos -0.5,0.5 --n 60 --m1 40 --m2 2 --as-samples 80 "
      "--k 2 --p 2 --d1 1 --reference-samples 500 --clock evaluations",
      "noise-study --param dimension=5 --seed 7 --sigmas 0.5 --hs 0.01 --splits 200x1,20x10 --as-samples 200 "
      "--gamma-m1 100 --gamma-m2 2 --ref-as-samples 500 --ref-m1 100 --ref-m2 5",
      "ebola --seed 8 --as-samples 500 --m1 100 --m2 5",
      "sobol-idx --model ebola --seed 9 --samples 2000",
  };
  fs::create_directories(dir);
  for (const auto& v : verbs) {
    const std::string cmd = shell_quote(cli) + " " + v + " --out " + shell_quote(dir.string()) + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      log += " command failed: gas " + v + ";";
      return false;
    }
  }
  return true;
}

Outcome determinism(const Options& opt) {
  const auto t0 = Clock::now();
  Outcome o;
  const std::string a = produce_outputs();
  const std::string b = produce_outputs();
  o.pass = a == b;
  o.detail = "in-process outputs (" + std::to_string(a.size()) + " bytes) " + (o.pass ? "identical" : "DIFFER");
  if (opt.cli.empty()) {
    o.detail += "; CLI reruns skipped (no --cli)";
    return with_runtime(o, seconds_since(t0), 600.0);
  }
  const fs::path root = fs::path(opt.work) / "determinism";
  fs::remove_all(root);
  std::string log;
  const bool ran = run_cli(opt.cli, root / "a", log) && run_cli(opt.cli, root / "b", log);
  std::size_t files = 0;
  bool same = ran;
  if (ran) {
    for (const auto& entry : fs::directory_iterator(root / "a")) {
      const std::string name = entry.path().filename().string();
      if (name.ends_with(".timing.json")) continue;
      ++files;
      const fs::path other = root / "b" / name;
      if (!fs::exists(other) || gas::read_text_file(entry.path().string()) != gas::read_text_file(other.string())) {
        same = false;
        log += " " + name + " differs;";
      }
    }
  }
  o.pass = o.pass && same && files > 0;
  o.detail += "; CLI: " + std::to_string(files) + " files compared, " + (same ? "identical" : "DIFFER") + log;
  return with_runtime(o, seconds_since(t0), 600.0);
}

Options parse_args(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const bool has_value = i + 1 < argc;
    if (arg == "--only" && has_value) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) opt.only.insert(std::stoi(tok));
    } else if (arg == "--cli" && has_value) {
      opt.cli = argv[++i];
    } else if (arg == "--work" && has_value) {
      opt.work = argv[++i];
    } else {
      std::cerr << "usage: gas_acceptance [--only N[,N...]] [--cli PATH] [--work DIR]\n";
      std::exit(2);
    }
  }
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  const Options opt = parse_args(argc, argv);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"linear exactness", linear_exactness},
      {"closed-form moment C11 = 2", closed_form_moment},
      {"Ebola spectra and first eigenvectors", ebola_table},
      {"Heston Gamma concentration", heston_gamma},
      {"heatmap GAS/AS mse_ratio < 1", heatmap_direction},
      {"noise robustness of GAS", noise_robustness},
      {"ridge direction recovery", ridge_recovery},
      {"PCE suite", pce_suite},
      {"conditional surrogate variance ~ 1/N1", surrogate_variance},
      {"undivided C diagonal vs upper Sobol' indices", sobol_consistency},
      {"byte-identical reruns", [&opt] { return determinism(opt); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!opt.only.empty() && !opt.only.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
