#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gas/models.hpp"
#include "gas/parallel.hpp"
#include "gas/sampling.hpp"

namespace gas {

/// How companion points v are paired with each base point z.
enum class CompanionScheme {
  /// First M2 points of the d-dimensional Sobol' sequence shifted mod 1 by
  /// F(z), then mapped back through the marginal quantile. Default.
  ShiftedSobol,
  /// v drawn from the input measure independently of z.
  Independent,
};

std::string to_string(CompanionScheme s);
CompanionScheme parse_companion_scheme(std::string_view name);

struct GasConfig {
  std::size_t m1 = 1000;
  std::size_t m2 = 1;
  double denom_floor = 1e-12;
  std::uint64_t seed = 0;
  CompanionScheme companions = CompanionScheme::ShiftedSobol;
  /// Evaluate f(z) once per base point and reuse it across coordinates and
  /// companions. When false, f(z) is re-evaluated for every difference,
  /// which decorrelates the noise of stochastic models.
  bool reuse_base = true;
  Execution execution = Execution::Parallel;

  void validate() const;
};

struct FiniteDiffSample {
  Eigen::VectorXd z;
  Eigen::VectorXd v;
  Eigen::VectorXd dvec;
};

/// One finite-difference vector. Returns nullopt when some |v_i - z_i| is
/// below `denom_floor`; the caller is expected to draw a new v.
std::optional<FiniteDiffSample> finite_diff_vector(const ModelFunction& f, const Eigen::VectorXd& z,
                                                   const Eigen::VectorXd& v, RngStream& rng,
                                                   double denom_floor = 1e-12);

/// Whether the differences are divided by (v_i - z_i).
enum class Quotient { Divided, Undivided };

/// d x (M1*M2) matrix whose column i*M2 + j is D f(z_i, v_ij) / sqrt(M1*M2),
/// so that B B^T is the Monte Carlo estimate of C.
Eigen::MatrixXd assemble_bhat(const ModelFunction& f, const GasConfig& cfg,
                              Quotient quotient = Quotient::Divided);

struct SubspaceDecomposition {
  Eigen::MatrixXd U;        // columns u_1..u_d
  Eigen::VectorXd lambdas;  // descending, non-negative
  std::size_t d1 = 0;       // 0 while unset
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::uint64_t seed = 0;
  std::string model;        // fingerprint of the model, if known

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(U.rows()); }
  /// lambdas / sum(lambdas); all zeros if the spectrum vanishes.
  Eigen::VectorXd normalized() const;
  Eigen::MatrixXd active() const;
  Eigen::MatrixXd inactive() const;
  void set_active_dimension(std::size_t d1);
};

/// Left singular vectors and squared singular values of `bhat`, with the
/// largest-magnitude entry of each column made positive.
SubspaceDecomposition decompose(const Eigen::MatrixXd& bhat,
                                std::optional<std::size_t> d1_hint = std::nullopt);

/// Same output for an explicit symmetric PSD matrix. Eigenvalues in
/// (-1e-10, 0) are reported as 0; more negative ones raise NumericalError.
SubspaceDecomposition decompose_symmetric(const Eigen::MatrixXd& c,
                                          std::optional<std::size_t> d1_hint = std::nullopt);

/// Flips each column so its largest-magnitude entry is positive.
void normalize_signs(Eigen::MatrixXd& u);

struct GammaEstimates {
  Eigen::VectorXd gammas;
  Eigen::VectorXd std_errors;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::uint64_t seed = 0;
  std::string model;

  Eigen::VectorXd normalized() const;
};

/// Mean squared directional finite difference along each column of U.
///
/// Standard-normal inputs: the step along u_i is drawn so that the new
/// coordinate u_i^T z + v is the shifted 1-D Sobol' value pushed through the
/// normal quantile. Uniform inputs: the step is placed on the segment of the
/// line z + s u_i inside the unit cube, by shifting the Sobol' value along it.
GammaEstimates estimate_gamma(const ModelFunction& f, const Eigen::MatrixXd& U, const GasConfig& cfg);

/// Position of the largest gap values_i - values_{i+1} (1-based, first on ties).
std::size_t select_d1(const Eigen::VectorXd& values);

struct AsConfig {
  std::size_t samples = 10000;
  double h = 1e-3;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;

  void validate() const;
};

struct AsResult {
  Eigen::MatrixXd C;
  SubspaceDecomposition decomposition;
};

/// Forward-difference gradients g_j at M i.i.d. points. For uniform inputs a
/// step that would leave the open cube is taken backwards instead.
Eigen::MatrixXd as_gradient_rows(const ModelFunction& f, const AsConfig& cfg);

/// Gradient rows at the given points (one per row of Z). Evaluation streams
/// are derived from `seed` per row.
Eigen::MatrixXd as_gradient_rows(const ModelFunction& f, const Eigen::MatrixXd& Z, double h, std::uint64_t seed,
                                 Execution ex = Execution::Parallel);

/// The base points used by as_gradient_rows(f, cfg).
Eigen::MatrixXd as_sample_points(const ModelFunction& f, const AsConfig& cfg);

/// C_AS = G^T G / M and its decomposition.
AsResult as_gradient_matrix(const ModelFunction& f, const AsConfig& cfg);

/// (1/N1) sum_i f(U1 w1 + U2 u_i), u_i ~ N(0, I). Standard-normal inputs only.
double conditional_surrogate_eval(const ModelFunction& f, const SubspaceDecomposition& decomp,
                                  const Eigen::VectorXd& w1, std::size_t n1, RngStream& rng);

struct SobolIndexEstimates {
  Eigen::VectorXd indices;
  Eigen::VectorXd std_errors;
  double variance = 0.0;
  std::size_t samples = 0;
};

/// S_i = mean((f(v_i:z) - f(z))^2) / (2 var f), with z and v independent.
SobolIndexEstimates upper_sobol_indices(const ModelFunction& f, std::size_t m, std::uint64_t seed,
                                        Execution ex = Execution::Parallel);

/// Per-coordinate mean of squared entries of the difference vectors behind
/// `bhat`, with standard errors computed over base points.
struct DiagonalEstimate {
  Eigen::VectorXd values;
  Eigen::VectorXd std_errors;
};
DiagonalEstimate bhat_diagonal(const Eigen::MatrixXd& bhat, std::size_t m1, std::size_t m2);

/// n rows of (u_1^T z [, u_2^T z], f(z)) for z drawn from the input measure.
Eigen::MatrixXd sufficient_summary(const ModelFunction& f, const SubspaceDecomposition& decomp,
                                   std::size_t k, std::size_t n, std::uint64_t seed,
                                   Execution ex = Execution::Parallel);

}  // namespace gas
