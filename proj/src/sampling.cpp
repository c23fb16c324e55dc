#include <algorithm>
#include <cmath>
#include <numbers>

#include "gas/error.hpp"
#include "gas/sampling.hpp"

namespace gas {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Wichura, "Algorithm AS 241: The percentage points of the normal
// distribution", Applied Statistics 37 (1988). Relative accuracy ~1e-16.
double norm_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("norm_quantile: argument must lie in (0, 1), got " + std::to_string(u));
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
               45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
               21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
             1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
             0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
             0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
             7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

std::string to_string(Marginal m) {
  switch (m) {
    case Marginal::StdNormal: return "std_normal";
    case Marginal::UnitUniform: return "unit_uniform";
  }
  return "unknown";
}

Marginal parse_marginal(std::string_view name) {
  if (name == "std_normal" || name == "normal") return Marginal::StdNormal;
  if (name == "unit_uniform" || name == "uniform") return Marginal::UnitUniform;
  throw ConfigError("unknown input marginal '" + std::string(name) + "'");
}

double InputDistribution::cdf(double x) const {
  if (kind == Marginal::StdNormal) return norm_cdf(x);
  return std::clamp(x, 0.0, 1.0);
}

double InputDistribution::quantile(double u) const {
  if (kind == Marginal::StdNormal) return norm_quantile(u);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("uniform quantile: argument outside [0, 1]");
  return u;
}

double InputDistribution::draw(RngStream& rng) const {
  return kind == Marginal::StdNormal ? rng.normal() : rng.uniform();
}

Eigen::MatrixXd sample_matrix(const InputDistribution& dist, std::size_t n, RngStream& rng) {
  if (n == 0) throw ConfigError("sample_matrix: n must be at least 1");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(dist.dimension);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = dist.draw(rng);
  return out;
}

double wrap_unit(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

Eigen::MatrixXd shift_points(const Eigen::MatrixXd& base, const Eigen::VectorXd& shift) {
  if (base.cols() != shift.size()) throw ConfigError("shift_points: dimension mismatch");
  Eigen::MatrixXd out(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.rows(); ++i)
    for (Eigen::Index j = 0; j < base.cols(); ++j) out(i, j) = wrap_unit(base(i, j) + shift(j));
  return out;
}

Eigen::MatrixXd shifted_sobol_points(SobolGenerator& gen, std::size_t count,
                                     const Eigen::VectorXd& shift) {
  if (static_cast<std::size_t>(shift.size()) != gen.dimension()) {
    throw ConfigError("shifted_sobol_points: shift dimension mismatch");
  }
  return shift_points(gen.take(count), shift);
}

}  // namespace gas
