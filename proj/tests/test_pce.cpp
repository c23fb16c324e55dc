#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "gas/error.hpp"
#include "gas/pce.hpp"
#include "oracles.hpp"

namespace {

using gas::PceBasis;
using gas::RngStream;

Eigen::MatrixXd normal_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  RngStream rng(seed, 0x77);
  return gas::sample_matrix({gas::Marginal::StdNormal, d}, n, rng);
}

Eigen::MatrixXd uniform_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  RngStream rng(seed, 0x78);
  return gas::sample_matrix({gas::Marginal::UnitUniform, d}, n, rng);
}

TEST(BasisTest, HermiteExamples) {
  EXPECT_NEAR(gas::basis_eval_1d(PceBasis::Hermite, 2, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(gas::basis_eval_1d(PceBasis::Hermite, 2, 2.0), 3.0 / std::sqrt(2.0), 1e-14);
  EXPECT_EQ(gas::basis_eval_1d(PceBasis::Hermite, 0, 5.0), 1.0);
  EXPECT_EQ(gas::basis_eval_1d(PceBasis::Hermite, 1, -0.3), -0.3);
}

TEST(BasisTest, AgreesWithExplicitPolynomials) {
  for (int n = 0; n <= 8; ++n) {
    for (double x : {-2.5, -0.7, 0.0, 0.4, 1.9}) {
      EXPECT_NEAR(gas::basis_eval_1d(PceBasis::Hermite, n, x), oracle::hermite_orthonormal(n, x), 1e-11);
    }
    for (double x : {0.01, 0.3, 0.5, 0.77, 0.99}) {
      EXPECT_NEAR(gas::basis_eval_1d(PceBasis::Legendre, n, x), oracle::legendre_orthonormal(n, x), 1e-11);
    }
  }
}

TEST(BasisTest, ValuesArrayMatchesSingleEvaluations) {
  double out[7];
  gas::basis_values_1d(PceBasis::Legendre, 6, 0.37, out);
  for (unsigned n = 0; n <= 6; ++n) EXPECT_EQ(out[n], gas::basis_eval_1d(PceBasis::Legendre, n, 0.37));
}

void expect_quadrature_orthonormal(PceBasis basis, const oracle::Quadrature& q) {
  for (unsigned i = 0; i <= 6; ++i) {
    for (unsigned j = 0; j <= 6; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < q.nodes.size(); ++k) {
        s += q.weights(k) * gas::basis_eval_1d(basis, i, q.nodes(k)) * gas::basis_eval_1d(basis, j, q.nodes(k));
      }
      EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-10) << i << "," << j;
    }
  }
}

TEST(BasisTest, HermiteOrthonormalUnderGaussHermite) {
  expect_quadrature_orthonormal(PceBasis::Hermite, oracle::gauss_hermite(12));
}

TEST(BasisTest, LegendreOrthonormalUnderGaussLegendre) {
  expect_quadrature_orthonormal(PceBasis::Legendre, oracle::gauss_legendre01(12));
}

TEST(BasisTest, NamesAndMarginals) {
  EXPECT_EQ(gas::basis_for(gas::Marginal::StdNormal), PceBasis::Hermite);
  EXPECT_EQ(gas::basis_for(gas::Marginal::UnitUniform), PceBasis::Legendre);
  for (auto b : {PceBasis::Hermite, PceBasis::Legendre}) EXPECT_EQ(gas::parse_pce_basis(gas::to_string(b)), b);
  EXPECT_THROW(gas::parse_pce_basis("laguerre"), gas::ConfigError);
}

TEST(MultiIndexTest, CardinalityAndOrder) {
  for (std::size_t d = 1; d <= 4; ++d) {
    for (unsigned p = 0; p <= 5; ++p) {
      const gas::MultiIndexSet set(d, p);
      const double expected = std::tgamma(d + p + 1.0) / (std::tgamma(d + 1.0) * std::tgamma(p + 1.0));
      ASSERT_EQ(set.size(), static_cast<std::size_t>(std::lround(expected)));
      ASSERT_EQ(set.size(), gas::pce_term_count(d, p));
      for (unsigned e : set[0]) EXPECT_EQ(e, 0u);
      unsigned prev_degree = 0;
      for (std::size_t i = 0; i < set.size(); ++i) {
        unsigned deg = 0;
        for (unsigned e : set[i]) deg += e;
        EXPECT_LE(deg, p);
        EXPECT_GE(deg, prev_degree);
        if (i > 0 && deg == prev_degree) {
          EXPECT_GT(set[i - 1], set[i]);
        }
        prev_degree = deg;
      }
    }
  }
  const gas::MultiIndexSet two(2, 2);
  const std::vector<std::vector<unsigned>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(two.indices(), expected);
}

TEST(DesignMatrixTest, Examples) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(2, 1, 0.7);
  const Eigen::MatrixXd psi = gas::build_design_matrix(one, gas::MultiIndexSet(1, 1), PceBasis::Hermite);
  EXPECT_EQ(psi(0, 0), 1.0);
  EXPECT_EQ(psi(0, 1), 0.7);
  const Eigen::MatrixXd pts = normal_points(20, 2, 1);
  const Eigen::MatrixXd d2 = gas::build_design_matrix(pts, gas::MultiIndexSet(2, 2), PceBasis::Hermite);
  EXPECT_EQ(d2.cols(), 6);
  EXPECT_EQ(d2.col(0), Eigen::VectorXd::Ones(20));
  for (Eigen::Index n = 0; n < 20; ++n) {
    EXPECT_NEAR(d2(n, 4), pts(n, 0) * pts(n, 1), 1e-15);
    EXPECT_NEAR(d2(n, 5), (pts(n, 1) * pts(n, 1) - 1.0) / std::sqrt(2.0), 1e-14);
  }
}

TEST(DesignMatrixTest, UnderdeterminedIsFitError) {
  EXPECT_THROW(gas::build_design_matrix(normal_points(5, 2, 1), gas::MultiIndexSet(2, 2), PceBasis::Hermite),
               gas::FitError);
}

// Degree one: every product psi_i psi_j has variance at most 2, so the flat
// 5/sqrt(N) band is a genuine bound.
TEST(DesignMatrixTest, EmpiricalGramApproachesIdentity) {
  for (auto basis : {PceBasis::Hermite, PceBasis::Legendre}) {
    const std::size_t n = 20000;
    const Eigen::MatrixXd pts = basis == PceBasis::Hermite ? normal_points(n, 2, 3) : uniform_points(n, 2, 3);
    const Eigen::MatrixXd psi = gas::build_design_matrix(pts, gas::MultiIndexSet(2, 1), basis);
    const Eigen::MatrixXd gram = psi.transpose() * psi / static_cast<double>(n);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n));
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), tol)
        << gas::to_string(basis);
  }
}

// Degree three: products such as psi_3^2 have variance up to 92, so each
// entry is compared to 5 of its own standard errors instead.
TEST(DesignMatrixTest, EmpiricalGramWithinFiveStandardErrors) {
  for (auto basis : {PceBasis::Hermite, PceBasis::Legendre}) {
    const std::size_t n = 20000;
    const Eigen::MatrixXd pts = basis == PceBasis::Hermite ? normal_points(n, 2, 4) : uniform_points(n, 2, 4);
    const Eigen::MatrixXd psi = gas::build_design_matrix(pts, gas::MultiIndexSet(2, 3), basis);
    for (Eigen::Index i = 0; i < psi.cols(); ++i) {
      for (Eigen::Index j = i; j < psi.cols(); ++j) {
        const Eigen::ArrayXd prod = psi.col(i).array() * psi.col(j).array();
        const double mean = prod.mean();
        const double sd = std::sqrt((prod - mean).square().sum() / static_cast<double>(n - 1));
        const double target = i == j ? 1.0 : 0.0;
        EXPECT_LE(std::abs(mean - target), 5.0 * sd / std::sqrt(static_cast<double>(n)))
            << gas::to_string(basis) << " (" << i << "," << j << ")";
      }
    }
  }
}

TEST(LeastSquaresTest, ExactInSpanAndUnitColumn) {
  const Eigen::MatrixXd psi =
      gas::build_design_matrix(normal_points(50, 2, 4), gas::MultiIndexSet(2, 3), PceBasis::Hermite);
  RngStream rng(5, 0);
  Eigen::VectorXd k(psi.cols());
  for (auto& x : k) x = rng.normal();
  const auto fit = gas::fit_least_squares(psi, psi * k);
  EXPECT_LT((psi * fit.coeffs - psi * k).norm(), 1e-9);
  EXPECT_LT(fit.residual_rms, 1e-9);
  const auto unit = gas::fit_least_squares(psi, psi.col(0));
  EXPECT_NEAR(unit.coeffs(0), 1.0, 1e-12);
  EXPECT_LE(unit.coeffs.tail(psi.cols() - 1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(fit.condition, 1.0);
}

TEST(LeastSquaresTest, RecoversSynthesizedExpansion) {
  for (unsigned p : {1u, 3u, 5u}) {
    const gas::MultiIndexSet set(2, p);
    const std::size_t n = 10 * set.size();
    const Eigen::MatrixXd pts = normal_points(n, 2, 10 + p);
    Eigen::VectorXd k(static_cast<Eigen::Index>(set.size()));
    RngStream rng(6, p);
    for (auto& x : k) x = rng.normal();
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < y.size(); ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i) {
        s += k(static_cast<Eigen::Index>(i)) * oracle::hermite_orthonormal(set[i][0], pts(r, 0)) *
             oracle::hermite_orthonormal(set[i][1], pts(r, 1));
      }
      y(r) = s;
    }
    const auto model = gas::fit_pce(pts, y, p, PceBasis::Hermite);
    EXPECT_LE((model.coeffs - k).cwiseAbs().maxCoeff(), 1e-8) << "p=" << p;
    EXPECT_LT(model.training_rms, 1e-8);
  }
}

TEST(LeastSquaresTest, RankDeficientDesignIsFitError) {
  Eigen::MatrixXd pts = normal_points(30, 1, 7);
  pts.setConstant(0.4);
  const Eigen::MatrixXd psi = gas::build_design_matrix(pts, gas::MultiIndexSet(1, 3), PceBasis::Hermite);
  try {
    gas::fit_least_squares(psi, Eigen::VectorXd::Ones(30));
    FAIL() << "expected FitError";
  } catch (const gas::FitError& e) {
    EXPECT_FALSE(e.condition() < 1e10);
  }
}

TEST(PceModelTest, PredictExamples) {
  const Eigen::MatrixXd pts = normal_points(40, 2, 8);
  Eigen::VectorXd y = pts.col(0).array().square() + pts.col(1).array();
  auto model = gas::fit_pce(pts, y, 2, PceBasis::Hermite);
  const Eigen::MatrixXd psi = gas::build_design_matrix(pts, model.index_set, PceBasis::Hermite);
  const Eigen::VectorXd fitted = psi * model.coeffs;
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    EXPECT_NEAR(gas::pce_predict(model, pts.row(r).transpose()), fitted(r), 1e-12);
  }
  model.coeffs.setZero();
  EXPECT_EQ(gas::pce_predict(model, Eigen::Vector2d(1.0, 2.0)), 0.0);
  model.coeffs(0) = 2.5;
  EXPECT_EQ(gas::pce_predict(model, Eigen::Vector2d(-3.0, 0.1)), 2.5);
  EXPECT_THROW(gas::pce_predict(model, Eigen::VectorXd::Zero(3)), gas::DomainError);
}

TEST(PceModelTest, MeanExamples) {
  const Eigen::MatrixXd pts = normal_points(1000, 1, 9);
  const auto constant = gas::fit_pce(pts, Eigen::VectorXd::Constant(1000, 4.25), 3, PceBasis::Hermite);
  EXPECT_NEAR(gas::pce_mean(constant), 4.25, 1e-12);
  const auto square = gas::fit_pce(pts, pts.col(0).array().square().matrix(), 2, PceBasis::Hermite);
  EXPECT_NEAR(gas::pce_mean(square), 1.0, 1e-6);
  const auto odd = gas::fit_pce(pts, pts.col(0), 0, PceBasis::Hermite);
  EXPECT_LE(std::abs(gas::pce_mean(odd)), 3.0 / std::sqrt(1000.0));
}

TEST(PceModelTest, MeanEqualsTensorQuadratureMean) {
  for (auto basis : {PceBasis::Hermite, PceBasis::Legendre}) {
    const auto q = basis == PceBasis::Hermite ? oracle::gauss_hermite(8) : oracle::gauss_legendre01(8);
    for (std::size_t d = 1; d <= 3; ++d) {
      for (unsigned p : {1u, 3u, 5u}) {
        gas::PceModel model;
        model.basis = basis;
        model.index_set = gas::MultiIndexSet(d, p);
        model.coeffs.resize(static_cast<Eigen::Index>(model.index_set.size()));
        RngStream rng(d, p);
        for (auto& x : model.coeffs) x = rng.normal();
        const std::size_t nq = static_cast<std::size_t>(q.nodes.size());
        std::size_t total = 1;
        for (std::size_t k = 0; k < d; ++k) total *= nq;
        double mean = 0.0;
        Eigen::VectorXd w(static_cast<Eigen::Index>(d));
        for (std::size_t idx = 0; idx < total; ++idx) {
          double weight = 1.0;
          std::size_t rem = idx;
          for (std::size_t k = 0; k < d; ++k) {
            const auto node = static_cast<Eigen::Index>(rem % nq);
            rem /= nq;
            w(static_cast<Eigen::Index>(k)) = q.nodes(node);
            weight *= q.weights(node);
          }
          mean += weight * gas::pce_predict(model, w);
        }
        EXPECT_NEAR(gas::pce_mean(model), mean, 1e-8) << gas::to_string(basis) << " d=" << d << " p=" << p;
      }
    }
  }
}

TEST(PceModelTest, DumpListsEveryTerm) {
  const auto model = gas::fit_pce(normal_points(30, 2, 10), Eigen::VectorXd::Ones(30), 2, PceBasis::Hermite);
  const std::string text = gas::pce_dump(model);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), model.index_set.size() + 1);
}

}  // namespace
