#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gas/parallel.hpp"
#include "gas/sampling.hpp"

namespace gas {

/// Orthonormal polynomial families. Hermite is orthonormal under N(0,1),
/// Legendre (shifted to [0,1]) under U(0,1).
enum class PceBasis { Hermite, Legendre };

std::string to_string(PceBasis b);
PceBasis parse_pce_basis(std::string_view name);
PceBasis basis_for(Marginal m);

/// psi_n(x) for the given family.
double basis_eval_1d(PceBasis basis, unsigned n, double x);

/// psi_0(x) .. psi_p(x) written to out[0..p].
void basis_values_1d(PceBasis basis, unsigned p, double x, double* out);

/// Total-degree multi-indices in graded lexicographic order: by total degree,
/// then by descending exponent of the first variable, and so on.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(std::size_t dim, unsigned degree);

  std::size_t dim() const noexcept { return dim_; }
  unsigned degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const std::vector<unsigned>& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<std::vector<unsigned>>& indices() const noexcept { return indices_; }

 private:
  std::size_t dim_ = 0;
  unsigned degree_ = 0;
  std::vector<std::vector<unsigned>> indices_;
};

/// binomial(dim + degree, dim).
std::size_t pce_term_count(std::size_t dim, unsigned degree);

/// Psi(n, i) = prod_k psi_{alpha_i[k]}(x_n[k]). Requires N >= P.
Eigen::MatrixXd build_design_matrix(const Eigen::MatrixXd& points, const MultiIndexSet& set,
                                    PceBasis basis, Execution ex = Execution::Parallel);

struct LeastSquaresFit {
  Eigen::VectorXd coeffs;
  double residual_rms = 0.0;
  double condition = 0.0;  // |r_11| / |r_PP| of the pivoted QR
};

/// Minimizer of |y - Psi k| via column-pivoted Householder QR. Throws FitError
/// when the design is rank deficient or its condition estimate exceeds 1e10.
LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

struct PceModel {
  PceBasis basis = PceBasis::Hermite;
  MultiIndexSet index_set;
  Eigen::VectorXd coeffs;
  double training_rms = 0.0;

  double predict(const Eigen::VectorXd& w) const;
  /// k_0, the mean under the matching input measure.
  double mean() const { return coeffs(0); }
};

PceModel fit_pce(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, unsigned degree, PceBasis basis,
                 Execution ex = Execution::Parallel);

double pce_predict(const PceModel& model, const Eigen::VectorXd& w);
double pce_mean(const PceModel& model);

/// Human-readable listing, one term per line: coefficient and multi-index.
std::string pce_dump(const PceModel& model);

}  // namespace gas
