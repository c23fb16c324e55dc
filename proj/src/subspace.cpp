#include "gas/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "gas/error.hpp"

namespace gas {

namespace {

// Stream ids under the configured seed. Each sample i then uses
// RngStream(seed, tag).derive(i), so the assignment of random numbers to
// samples does not depend on how the loop is scheduled.
constexpr std::uint64_t kTagGasBase = 0x100;
constexpr std::uint64_t kTagGasEval = 0x101;
constexpr std::uint64_t kTagGasCompanion = 0x102;
constexpr std::uint64_t kTagGammaBase = 0x200;
constexpr std::uint64_t kTagGammaEval = 0x201;
constexpr std::uint64_t kTagGammaRedraw = 0x202;
constexpr std::uint64_t kTagAsBase = 0x300;
constexpr std::uint64_t kTagAsEval = 0x301;
constexpr std::uint64_t kTagSobolBase = 0x400;
constexpr std::uint64_t kTagSobolCompanion = 0x401;
constexpr std::uint64_t kTagSobolEval = 0x402;
constexpr std::uint64_t kTagSummaryBase = 0x500;
constexpr std::uint64_t kTagSummaryEval = 0x501;

constexpr int kMaxResamples = 100;

bool inside_open_cube(const Eigen::VectorXd& x) {
  return (x.array() > 0.0).all() && (x.array() < 1.0).all();
}

// Companion coordinate for shifted Sobol' value x and base coordinate zc.
// Returns NaN when the shifted value lands on 0, where the normal quantile
// is undefined.
double shifted_companion(const InputDistribution& dist, double x, double zc) {
  const double y = wrap_unit(x + dist.cdf(zc));
  if (dist.kind == Marginal::StdNormal) {
    return y > 0.0 ? norm_quantile(y) : std::numeric_limits<double>::quiet_NaN();
  }
  return y;
}

bool companion_ok(const Eigen::VectorXd& z, const Eigen::VectorXd& v, const InputDistribution& dist,
                  double floor) {
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    if (!(std::abs(v(c) - z(c)) >= floor)) return false;
    if (dist.kind == Marginal::UnitUniform && !(v(c) > 0.0 && v(c) < 1.0)) return false;
  }
  return true;
}

// Column-wise mean and standard error of the mean over rows.
void column_stats(const Eigen::MatrixXd& rows, Eigen::VectorXd& mean, Eigen::VectorXd& se) {
  const auto n = rows.rows();
  mean = rows.colwise().mean().transpose();
  se = Eigen::VectorXd::Zero(rows.cols());
  if (n < 2) return;
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const double ss = (rows.col(c).array() - mean(c)).square().sum();
    se(c) = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
}

}  // namespace

std::string to_string(CompanionScheme s) {
  return s == CompanionScheme::ShiftedSobol ? "shifted_sobol" : "independent";
}

CompanionScheme parse_companion_scheme(std::string_view name) {
  if (name == "shifted_sobol") return CompanionScheme::ShiftedSobol;
  if (name == "independent") return CompanionScheme::Independent;
  throw ConfigError("unknown companion scheme '" + std::string(name) + "'");
}

void GasConfig::validate() const {
  if (m1 < 1 || m2 < 1) throw ConfigError("GAS sample sizes M1 and M2 must be >= 1");
  if (!(denom_floor > 0.0)) throw ConfigError("denom_floor must be positive");
}

void AsConfig::validate() const {
  if (samples < 1) throw ConfigError("AS sample size must be >= 1");
  if (!(h > 0.0)) throw ConfigError("AS increment h must be positive");
}

// --- finite differences ----------------------------------------------------

std::optional<FiniteDiffSample> finite_diff_vector(const ModelFunction& f, const Eigen::VectorXd& z,
                                                   const Eigen::VectorXd& v, RngStream& rng,
                                                   double denom_floor) {
  if (z.size() != v.size() || static_cast<std::size_t>(z.size()) != f.dimension()) {
    throw DomainError("finite_diff_vector: z and v must match the model dimension");
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(std::abs(v(i) - z(i)) >= denom_floor)) return std::nullopt;
  }
  FiniteDiffSample out{z, v, Eigen::VectorXd(z.size())};
  const double fz = f.evaluate(z, rng);
  Eigen::VectorXd point = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    point(i) = v(i);
    out.dvec(i) = (f.evaluate(point, rng) - fz) / (v(i) - z(i));
    point(i) = z(i);
  }
  if (!out.dvec.allFinite()) throw EstimationError("finite_diff_vector: non-finite difference");
  return out;
}

Eigen::MatrixXd assemble_bhat(const ModelFunction& f, const GasConfig& cfg, Quotient quotient) {
  cfg.validate();
  const InputDistribution& dist = f.input();
  const auto d = static_cast<Eigen::Index>(f.dimension());
  const std::size_t n = cfg.m1 * cfg.m2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  RngStream base_rng(cfg.seed, kTagGasBase);
  const Eigen::MatrixXd Z = sample_matrix(dist, cfg.m1, base_rng);
  Eigen::MatrixXd X;
  if (cfg.companions == CompanionScheme::ShiftedSobol) {
    SobolGenerator gen(f.dimension());
    X = gen.take(cfg.m2);
  }
  const RngStream eval_root(cfg.seed, kTagGasEval);
  const RngStream companion_root(cfg.seed, kTagGasCompanion);

  Eigen::MatrixXd B(d, static_cast<Eigen::Index>(n));
  for_each_index(cfg.m1, cfg.execution, [&](std::size_t i) {
    RngStream eval = eval_root.derive(i);
    RngStream comp = companion_root.derive(i);
    const Eigen::VectorXd z = Z.row(static_cast<Eigen::Index>(i)).transpose();
    Eigen::VectorXd v(d);
    Eigen::VectorXd point = z;
    const double fz = cfg.reuse_base ? f.evaluate(z, eval) : 0.0;
    for (std::size_t j = 0; j < cfg.m2; ++j) {
      for (Eigen::Index c = 0; c < d; ++c) {
        v(c) = cfg.companions == CompanionScheme::ShiftedSobol
                   ? shifted_companion(dist, X(static_cast<Eigen::Index>(j), c), z(c))
                   : dist.draw(comp);
      }
      int attempts = 0;
      while (!companion_ok(z, v, dist, cfg.denom_floor)) {
        if (++attempts > kMaxResamples) {
          throw EstimationError("assemble_bhat: companion point kept violating the denominator floor");
        }
        for (Eigen::Index c = 0; c < d; ++c) v(c) = dist.draw(comp);
      }
      const auto col = static_cast<Eigen::Index>(i * cfg.m2 + j);
      for (Eigen::Index c = 0; c < d; ++c) {
        point(c) = v(c);
        const double fv = f.evaluate(point, eval);
        point(c) = z(c);
        const double base = cfg.reuse_base ? fz : f.evaluate(z, eval);
        double q = fv - base;
        if (quotient == Quotient::Divided) q /= v(c) - z(c);
        if (!std::isfinite(q)) throw EstimationError("assemble_bhat: non-finite difference quotient");
        B(c, col) = q * scale;
      }
    }
  });
  return B;
}

DiagonalEstimate bhat_diagonal(const Eigen::MatrixXd& bhat, std::size_t m1, std::size_t m2) {
  const auto n = static_cast<Eigen::Index>(m1 * m2);
  if (bhat.cols() != n || m1 == 0 || m2 == 0) {
    throw DomainError("bhat_diagonal: column count must equal M1*M2");
  }
  Eigen::MatrixXd per_point = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m1), bhat.rows());
  const double n_d = static_cast<double>(n);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) {
      const auto col = static_cast<Eigen::Index>(i * m2 + j);
      per_point.row(static_cast<Eigen::Index>(i)) += (bhat.col(col).array().square() * n_d).matrix().transpose();
    }
  }
  per_point /= static_cast<double>(m2);
  DiagonalEstimate out;
  column_stats(per_point, out.values, out.std_errors);
  return out;
}

// --- decomposition ---------------------------------------------------------

void normalize_signs(Eigen::MatrixXd& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) u.col(j) = -u.col(j);
  }
}

Eigen::VectorXd SubspaceDecomposition::normalized() const {
  const double total = lambdas.sum();
  if (!(total > 0.0)) return Eigen::VectorXd::Zero(lambdas.size());
  return lambdas / total;
}

Eigen::MatrixXd SubspaceDecomposition::active() const {
  if (d1 == 0) throw ConfigError("active dimension d1 is not set");
  return U.leftCols(static_cast<Eigen::Index>(d1));
}

Eigen::MatrixXd SubspaceDecomposition::inactive() const {
  if (d1 == 0) throw ConfigError("active dimension d1 is not set");
  return U.rightCols(U.cols() - static_cast<Eigen::Index>(d1));
}

void SubspaceDecomposition::set_active_dimension(std::size_t k) {
  if (k < 1 || k > dimension()) {
    throw ConfigError("active dimension must lie in [1, d], got " + std::to_string(k));
  }
  d1 = k;
}

SubspaceDecomposition decompose(const Eigen::MatrixXd& bhat, std::optional<std::size_t> d1_hint) {
  if (bhat.rows() == 0 || bhat.cols() == 0) throw DomainError("decompose: empty matrix");
  if (!bhat.allFinite()) throw DomainError("decompose: matrix has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(bhat, Eigen::ComputeFullU);
  if (svd.info() != Eigen::Success) throw NumericalError("decompose: SVD did not converge");

  SubspaceDecomposition out;
  out.U = svd.matrixU();
  normalize_signs(out.U);
  out.lambdas = Eigen::VectorXd::Zero(bhat.rows());
  const auto& s = svd.singularValues();
  out.lambdas.head(s.size()) = s.array().square().matrix();
  if (d1_hint) out.set_active_dimension(*d1_hint);
  return out;
}

SubspaceDecomposition decompose_symmetric(const Eigen::MatrixXd& c, std::optional<std::size_t> d1_hint) {
  if (c.rows() != c.cols() || c.rows() == 0) throw DomainError("decompose_symmetric: need a square matrix");
  if (!c.allFinite()) throw DomainError("decompose_symmetric: matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) throw NumericalError("decompose_symmetric: eigensolver failed");
  const auto d = c.rows();
  SubspaceDecomposition out;
  out.U.resize(d, d);
  out.lambdas.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double lam = eig.eigenvalues()(d - 1 - k);
    if (lam < 0.0) {
      if (lam <= -1e-10) throw NumericalError("decompose_symmetric: matrix has a negative eigenvalue");
      lam = 0.0;
    }
    out.lambdas(k) = lam;
    out.U.col(k) = eig.eigenvectors().col(d - 1 - k);
  }
  normalize_signs(out.U);
  if (d1_hint) out.set_active_dimension(*d1_hint);
  return out;
}

std::size_t select_d1(const Eigen::VectorXd& values) {
  if (values.size() < 2) throw DomainError("select_d1 needs at least two values");
  Eigen::Index best = 0;
  double best_gap = values(0) - values(1);
  for (Eigen::Index i = 1; i + 1 < values.size(); ++i) {
    const double gap = values(i) - values(i + 1);
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return static_cast<std::size_t>(best) + 1;
}

// --- Gamma -----------------------------------------------------------------

Eigen::VectorXd GammaEstimates::normalized() const {
  const double total = gammas.sum();
  if (!(total > 0.0)) return Eigen::VectorXd::Zero(gammas.size());
  return gammas / total;
}

GammaEstimates estimate_gamma(const ModelFunction& f, const Eigen::MatrixXd& U, const GasConfig& cfg) {
  cfg.validate();
  const InputDistribution& dist = f.input();
  const auto d = static_cast<Eigen::Index>(f.dimension());
  if (U.rows() != d || U.cols() != d) throw DomainError("estimate_gamma: U must be d x d");

  RngStream base_rng(cfg.seed, kTagGammaBase);
  const Eigen::MatrixXd Z = sample_matrix(dist, cfg.m1, base_rng);
  // 1-D Sobol' values v'(2)..v'(M2+1); v'(1) = 0.5 is dropped.
  SobolGenerator gen1(1);
  const Eigen::MatrixXd sob = gen1.take(cfg.m2 + 1);
  const RngStream eval_root(cfg.seed, kTagGammaEval);
  const RngStream redraw_root(cfg.seed, kTagGammaRedraw);
  const bool uniform = dist.kind == Marginal::UnitUniform;

  Eigen::MatrixXd contrib(static_cast<Eigen::Index>(cfg.m1), d);
  for_each_index(cfg.m1, cfg.execution, [&](std::size_t j) {
    RngStream eval = eval_root.derive(j);
    RngStream redraw = redraw_root.derive(j);
    const Eigen::VectorXd z = Z.row(static_cast<Eigen::Index>(j)).transpose();
    const double fz = cfg.reuse_base ? f.evaluate(z, eval) : 0.0;
    Eigen::VectorXd point(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto u = U.col(i);
      // Standard normal: the coordinate t = u^T z is moved to Phi^{-1}(y).
      // Uniform: s ranges over [s_lo, s_hi], the chord of the cube through z.
      double t = 0.0, shift = 0.0, s_lo = 0.0, s_len = 0.0;
      if (uniform) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < d; ++c) {
          if (u(c) == 0.0) continue;
          const double a = -z(c) / u(c);
          const double b = (1.0 - z(c)) / u(c);
          lo = std::max(lo, std::min(a, b));
          hi = std::min(hi, std::max(a, b));
        }
        s_lo = lo;
        s_len = hi - lo;
        if (!(s_len > 0.0)) throw EstimationError("estimate_gamma: degenerate chord through the cube");
        shift = -s_lo / s_len;
      } else {
        t = u.dot(z);
        shift = norm_cdf(t);
      }
      auto step_from = [&](double y) {
        if (uniform) return s_lo + s_len * y;
        return y > 0.0 ? norm_quantile(y) - t : std::numeric_limits<double>::quiet_NaN();
      };
      double acc = 0.0;
      for (std::size_t k = 0; k < cfg.m2; ++k) {
        double step = step_from(wrap_unit(sob(static_cast<Eigen::Index>(k) + 1, 0) + shift));
        int attempts = 0;
        while (true) {
          if (std::abs(step) >= cfg.denom_floor) {
            point = z + step * u;
            if (!uniform || inside_open_cube(point)) break;
          }
          if (++attempts > kMaxResamples) {
            throw EstimationError("estimate_gamma: step kept violating the denominator floor");
          }
          step = step_from(redraw.uniform());
        }
        const double base = cfg.reuse_base ? fz : f.evaluate(z, eval);
        const double q = (f.evaluate(point, eval) - base) / step;
        if (!std::isfinite(q)) throw EstimationError("estimate_gamma: non-finite difference quotient");
        acc += q * q;
      }
      contrib(static_cast<Eigen::Index>(j), i) = acc / static_cast<double>(cfg.m2);
    }
  });

  GammaEstimates out;
  column_stats(contrib, out.gammas, out.std_errors);
  out.m1 = cfg.m1;
  out.m2 = cfg.m2;
  out.seed = cfg.seed;
  out.model = f.fingerprint();
  return out;
}

// --- AS baseline -----------------------------------------------------------

Eigen::MatrixXd as_sample_points(const ModelFunction& f, const AsConfig& cfg) {
  cfg.validate();
  RngStream base_rng(cfg.seed, kTagAsBase);
  return sample_matrix(f.input(), cfg.samples, base_rng);
}

Eigen::MatrixXd as_gradient_rows(const ModelFunction& f, const AsConfig& cfg) {
  return as_gradient_rows(f, as_sample_points(f, cfg), cfg.h, cfg.seed, cfg.execution);
}

Eigen::MatrixXd as_gradient_rows(const ModelFunction& f, const Eigen::MatrixXd& Z, double h, std::uint64_t seed,
                                 Execution ex) {
  const auto d = static_cast<Eigen::Index>(f.dimension());
  if (Z.cols() != d) throw DomainError("as_gradient_rows: points must have the model dimension");
  if (!(h > 0.0)) throw ConfigError("AS increment h must be positive");
  const bool uniform = f.input().kind == Marginal::UnitUniform;
  if (uniform && !(h < 0.5)) throw ConfigError("AS increment h must be < 0.5 on the unit cube");
  const RngStream eval_root(seed, kTagAsEval);

  Eigen::MatrixXd G(Z.rows(), d);
  for_each_index(static_cast<std::size_t>(Z.rows()), ex, [&](std::size_t j) {
    RngStream eval = eval_root.derive(j);
    const Eigen::VectorXd z = Z.row(static_cast<Eigen::Index>(j)).transpose();
    const double fz = f.evaluate(z, eval);
    Eigen::VectorXd point = z;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double step = (uniform && z(c) + h >= 1.0) ? -h : h;
      point(c) = z(c) + step;
      const double g = (f.evaluate(point, eval) - fz) / step;
      point(c) = z(c);
      if (!std::isfinite(g)) throw EstimationError("as_gradient_rows: non-finite difference");
      G(static_cast<Eigen::Index>(j), c) = g;
    }
  });
  return G;
}

AsResult as_gradient_matrix(const ModelFunction& f, const AsConfig& cfg) {
  const Eigen::MatrixXd G = as_gradient_rows(f, cfg);
  const double m = static_cast<double>(cfg.samples);
  AsResult out;
  out.C = G.transpose() * G / m;
  out.decomposition = decompose(G.transpose() / std::sqrt(m));
  out.decomposition.m1 = cfg.samples;
  out.decomposition.m2 = 1;
  out.decomposition.seed = cfg.seed;
  out.decomposition.model = f.fingerprint();
  return out;
}

// --- surrogate -------------------------------------------------------------

double conditional_surrogate_eval(const ModelFunction& f, const SubspaceDecomposition& decomp,
                                  const Eigen::VectorXd& w1, std::size_t n1, RngStream& rng) {
  if (f.input().kind != Marginal::StdNormal) {
    throw UnsupportedError("conditional surrogate requires standard-normal inputs");
  }
  const auto d = static_cast<Eigen::Index>(f.dimension());
  if (decomp.U.rows() != d) throw DomainError("conditional surrogate: decomposition dimension mismatch");
  if (decomp.d1 == 0) throw ConfigError("conditional surrogate: active dimension d1 is not set");
  const auto d1 = static_cast<Eigen::Index>(decomp.d1);
  if (w1.size() != d1) throw DomainError("conditional surrogate: w1 must have length d1");

  const Eigen::VectorXd anchor = decomp.U.leftCols(d1) * w1;
  if (d1 == d) return f.evaluate(anchor, rng);
  if (n1 < 1) throw ConfigError("conditional surrogate: N1 must be >= 1");

  const auto U2 = decomp.U.rightCols(d - d1);
  Eigen::VectorXd u(d - d1);
  Eigen::VectorXd z(d);
  double acc = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = rng.normal();
    z.noalias() = anchor + U2 * u;
    acc += f.evaluate(z, rng);
  }
  return acc / static_cast<double>(n1);
}

// --- Sobol' indices --------------------------------------------------------

SobolIndexEstimates upper_sobol_indices(const ModelFunction& f, std::size_t m, std::uint64_t seed,
                                        Execution ex) {
  if (m < 2) throw ConfigError("upper_sobol_indices needs at least two samples");
  const InputDistribution& dist = f.input();
  const auto d = static_cast<Eigen::Index>(f.dimension());
  RngStream base_rng(seed, kTagSobolBase);
  RngStream comp_rng(seed, kTagSobolCompanion);
  const Eigen::MatrixXd Z = sample_matrix(dist, m, base_rng);
  const Eigen::MatrixXd V = sample_matrix(dist, m, comp_rng);
  const RngStream eval_root(seed, kTagSobolEval);

  const auto rows = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd sq(rows, d);
  Eigen::VectorXd fz(rows);
  for_each_index(m, ex, [&](std::size_t j) {
    const auto r = static_cast<Eigen::Index>(j);
    RngStream eval = eval_root.derive(j);
    const Eigen::VectorXd z = Z.row(r).transpose();
    const double base = f.evaluate(z, eval);
    fz(r) = base;
    Eigen::VectorXd point = z;
    for (Eigen::Index c = 0; c < d; ++c) {
      point(c) = V(r, c);
      const double diff = f.evaluate(point, eval) - base;
      point(c) = z(c);
      sq(r, c) = diff * diff;
    }
  });

  const double mean = fz.mean();
  const double var = (fz.array() - mean).square().sum() / static_cast<double>(m - 1);
  if (!(var > 0.0) || var <= 1e-24 * mean * mean) {
    throw DegenerateFunctionError("upper_sobol_indices: function variance is numerically zero");
  }
  SobolIndexEstimates out;
  column_stats(sq, out.indices, out.std_errors);
  out.indices /= 2.0 * var;
  out.std_errors /= 2.0 * var;
  out.variance = var;
  out.samples = m;
  return out;
}

// --- sufficient summary ----------------------------------------------------

Eigen::MatrixXd sufficient_summary(const ModelFunction& f, const SubspaceDecomposition& decomp,
                                   std::size_t k, std::size_t n, std::uint64_t seed, Execution ex) {
  const auto d = static_cast<Eigen::Index>(f.dimension());
  if (k < 1 || k > 2) throw ConfigError("sufficient_summary: k must be 1 or 2");
  if (static_cast<Eigen::Index>(k) > d) throw ConfigError("sufficient_summary: k exceeds the dimension");
  if (decomp.U.rows() != d) throw DomainError("sufficient_summary: decomposition dimension mismatch");
  if (n < 1) throw ConfigError("sufficient_summary: need at least one point");

  RngStream base_rng(seed, kTagSummaryBase);
  const Eigen::MatrixXd Z = sample_matrix(f.input(), n, base_rng);
  const RngStream eval_root(seed, kTagSummaryEval);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), kk + 1);
  out.leftCols(kk) = Z * decomp.U.leftCols(kk);
  for_each_index(n, ex, [&](std::size_t i) {
    RngStream eval = eval_root.derive(i);
    const auto r = static_cast<Eigen::Index>(i);
    out(r, kk) = f.evaluate(Z.row(r).transpose(), eval);
  });
  return out;
}

}  // namespace gas
