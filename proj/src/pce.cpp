#include "gas/pce.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gas/config.hpp"
#include "gas/error.hpp"

namespace gas {

std::string to_string(PceBasis b) { return b == PceBasis::Hermite ? "hermite" : "legendre"; }

PceBasis parse_pce_basis(std::string_view name) {
  if (name == "hermite") return PceBasis::Hermite;
  if (name == "legendre") return PceBasis::Legendre;
  throw ConfigError("unknown PCE basis '" + std::string(name) + "'");
}

PceBasis basis_for(Marginal m) { return m == Marginal::StdNormal ? PceBasis::Hermite : PceBasis::Legendre; }

void basis_values_1d(PceBasis basis, unsigned p, double x, double* out) {
  out[0] = 1.0;
  if (p == 0) return;
  if (basis == PceBasis::Hermite) {
    out[1] = x;
    for (unsigned n = 1; n < p; ++n) {
      out[n + 1] = (x * out[n] - std::sqrt(static_cast<double>(n)) * out[n - 1]) /
                   std::sqrt(static_cast<double>(n + 1));
    }
    return;
  }
  // Legendre P_n(t) on t = 2x - 1, then scaled by sqrt(2n + 1).
  const double t = 2.0 * x - 1.0;
  double prev = 1.0, cur = t;
  out[1] = std::sqrt(3.0) * t;
  for (unsigned n = 1; n < p; ++n) {
    const double nd = static_cast<double>(n);
    const double next = ((2.0 * nd + 1.0) * t * cur - nd * prev) / (nd + 1.0);
    prev = cur;
    cur = next;
    out[n + 1] = std::sqrt(2.0 * nd + 3.0) * cur;
  }
}

double basis_eval_1d(PceBasis basis, unsigned n, double x) {
  std::vector<double> v(n + 1);
  basis_values_1d(basis, n, x, v.data());
  return v[n];
}

std::size_t pce_term_count(std::size_t dim, unsigned degree) {
  // binomial(dim + degree, degree), built incrementally to stay exact.
  std::size_t c = 1;
  for (unsigned k = 1; k <= degree; ++k) c = c * (dim + k) / k;
  return c;
}

namespace {

// All exponent tuples of length `dim` summing to `total`, largest first
// exponent first.
void append_degree(std::size_t dim, unsigned total, std::vector<unsigned>& cur, std::size_t pos,
                   std::vector<std::vector<unsigned>>& out) {
  if (pos + 1 == dim) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (unsigned a = total + 1; a-- > 0;) {
    cur[pos] = a;
    append_degree(dim, total - a, cur, pos + 1, out);
  }
}

// Basis products for one point, written into `out` (length P).
template <class Point, class Out>
void design_row(const Point& x, const MultiIndexSet& set, PceBasis basis, Out&& out) {
  const auto dim = static_cast<Eigen::Index>(set.dim());
  const unsigned deg = set.degree();
  const std::size_t stride = deg + 1;
  // table[k * stride + m] = psi_m(x_k)
  std::vector<double> table(static_cast<std::size_t>(dim) * stride);
  for (Eigen::Index k = 0; k < dim; ++k) {
    basis_values_1d(basis, deg, x(k), table.data() + static_cast<std::size_t>(k) * stride);
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& alpha = set[i];
    double prod = 1.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) prod *= table[k * stride + alpha[k]];
    out(static_cast<Eigen::Index>(i)) = prod;
  }
}

}  // namespace

MultiIndexSet::MultiIndexSet(std::size_t dim, unsigned degree) : dim_(dim), degree_(degree) {
  if (dim == 0) throw ConfigError("multi-index set needs dim >= 1");
  std::vector<unsigned> cur(dim, 0);
  for (unsigned total = 0; total <= degree; ++total) append_degree(dim, total, cur, 0, indices_);
}

Eigen::MatrixXd build_design_matrix(const Eigen::MatrixXd& points, const MultiIndexSet& set, PceBasis basis,
                                    Execution ex) {
  const auto n = points.rows();
  const auto dim = static_cast<Eigen::Index>(set.dim());
  const auto p = static_cast<Eigen::Index>(set.size());
  if (points.cols() != dim) throw DomainError("design matrix: point dimension does not match the index set");
  if (n < p) {
    throw FitError("design matrix: " + std::to_string(n) + " points cannot determine " + std::to_string(p) +
                       " coefficients",
                   std::numeric_limits<double>::infinity());
  }
  Eigen::MatrixXd psi(n, p);
  for_each_index(static_cast<std::size_t>(n), ex, [&](std::size_t row) {
    const auto r = static_cast<Eigen::Index>(row);
    design_row(points.row(r), set, basis, psi.row(r));
  });
  return psi;
}

LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  if (design.rows() != y.size()) throw DomainError("least squares: design rows and y length differ");
  if (design.rows() < design.cols()) {
    throw FitError("least squares: underdetermined system", std::numeric_limits<double>::infinity());
  }
  if (!design.allFinite() || !y.allFinite()) {
    throw FitError("least squares: non-finite data", std::numeric_limits<double>::quiet_NaN());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto p = design.cols();
  const auto& r = qr.matrixQR();
  const double top = std::abs(r(0, 0));
  const double bottom = std::abs(r(p - 1, p - 1));
  const double condition = bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
  if (qr.rank() < p || !(condition < 1e10)) {
    throw FitError("least squares: design is rank deficient or ill-conditioned (condition estimate " +
                       format_double(condition) + ")",
                   condition);
  }
  LeastSquaresFit out;
  out.coeffs = qr.solve(y);
  out.condition = condition;
  out.residual_rms = std::sqrt((y - design * out.coeffs).squaredNorm() / static_cast<double>(y.size()));
  return out;
}

double PceModel::predict(const Eigen::VectorXd& w) const {
  const auto dim = static_cast<Eigen::Index>(index_set.dim());
  if (w.size() != dim) throw DomainError("pce_predict: expected a point of dimension " + std::to_string(dim));
  Eigen::VectorXd row(static_cast<Eigen::Index>(index_set.size()));
  design_row(w, index_set, basis, row);
  return row.dot(coeffs);
}

double pce_predict(const PceModel& model, const Eigen::VectorXd& w) { return model.predict(w); }

double pce_mean(const PceModel& model) { return model.mean(); }

PceModel fit_pce(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, unsigned degree, PceBasis basis,
                 Execution ex) {
  PceModel model;
  model.basis = basis;
  model.index_set = MultiIndexSet(static_cast<std::size_t>(points.cols()), degree);
  const Eigen::MatrixXd psi = build_design_matrix(points, model.index_set, basis, ex);
  const LeastSquaresFit fit = fit_least_squares(psi, y);
  model.coeffs = fit.coeffs;
  model.training_rms = fit.residual_rms;
  return model;
}

std::string pce_dump(const PceModel& model) {
  std::ostringstream os;
  os << "basis " << to_string(model.basis) << ", dim " << model.index_set.dim() << ", degree "
     << model.index_set.degree() << ", terms " << model.index_set.size() << "\n";
  for (std::size_t i = 0; i < model.index_set.size(); ++i) {
    os << format_double(model.coeffs(static_cast<Eigen::Index>(i))) << "  (";
    const auto& a = model.index_set[i];
    for (std::size_t k = 0; k < a.size(); ++k) os << (k ? "," : "") << a[k];
    os << ")\n";
  }
  return os.str();
}

}  // namespace gas
