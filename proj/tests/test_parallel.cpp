#include <atomic>
#include <stdexcept>

#include <omp.h>

#include <gtest/gtest.h>

#include "gas/bench.hpp"
#include "gas/pce.hpp"
#include "gas/subspace.hpp"

namespace {

using gas::Execution;

// Forces several OpenMP threads even on a single-core host so the parallel
// paths actually interleave.
class ParallelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

gas::QuadraticNoiseModel noisy_quadratic() {
  gas::QuadraticConfig c;
  c.noise_sigma = 0.3;
  return gas::QuadraticNoiseModel(c);
}

TEST_F(ParallelTest, ForEachIndexVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  gas::for_each_index(hits.size(), Execution::Parallel, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST_F(ParallelTest, ForEachIndexRethrows) {
  auto body = [](std::size_t i) {
    if (i == 37) throw std::runtime_error("boom");
  };
  EXPECT_THROW(gas::for_each_index(100, Execution::Parallel, body), std::runtime_error);
  EXPECT_THROW(gas::for_each_index(100, Execution::Serial, body), std::runtime_error);
}

TEST_F(ParallelTest, BhatIsBitIdentical) {
  const auto f = noisy_quadratic();
  gas::GasConfig cfg;
  cfg.m1 = 500;
  cfg.m2 = 3;
  cfg.seed = 12;
  cfg.execution = Execution::Serial;
  const Eigen::MatrixXd serial = gas::assemble_bhat(f, cfg);
  cfg.execution = Execution::Parallel;
  EXPECT_EQ(gas::assemble_bhat(f, cfg), serial);
}

TEST_F(ParallelTest, GammaIsBitIdentical) {
  gas::HestonConfig hc;
  hc.vol_paths = 2;
  const gas::AsianHestonModel f(hc);
  gas::GasConfig cfg;
  cfg.m1 = 60;
  cfg.m2 = 3;
  cfg.seed = 13;
  const Eigen::MatrixXd U = Eigen::MatrixXd::Identity(10, 10);
  cfg.execution = Execution::Serial;
  const auto serial = gas::estimate_gamma(f, U, cfg);
  cfg.execution = Execution::Parallel;
  const auto parallel = gas::estimate_gamma(f, U, cfg);
  EXPECT_EQ(parallel.gammas, serial.gammas);
  EXPECT_EQ(parallel.std_errors, serial.std_errors);
}

TEST_F(ParallelTest, AsGradientsAreBitIdentical) {
  const auto f = noisy_quadratic();
  gas::AsConfig cfg;
  cfg.samples = 700;
  cfg.seed = 14;
  cfg.execution = Execution::Serial;
  const Eigen::MatrixXd serial = gas::as_gradient_rows(f, cfg);
  cfg.execution = Execution::Parallel;
  EXPECT_EQ(gas::as_gradient_rows(f, cfg), serial);
}

TEST_F(ParallelTest, SobolIndicesAndSummaryAreBitIdentical) {
  const auto f = noisy_quadratic();
  const auto s = gas::upper_sobol_indices(f, 2000, 15, Execution::Serial);
  const auto p = gas::upper_sobol_indices(f, 2000, 15, Execution::Parallel);
  EXPECT_EQ(s.indices, p.indices);
  EXPECT_EQ(s.std_errors, p.std_errors);
  const auto dec = gas::decompose(Eigen::MatrixXd::Identity(10, 10));
  EXPECT_EQ(gas::sufficient_summary(f, dec, 2, 800, 16, Execution::Serial),
            gas::sufficient_summary(f, dec, 2, 800, 16, Execution::Parallel));
}

TEST_F(ParallelTest, DesignMatrixIsBitIdentical) {
  gas::RngStream rng(17, 0);
  const Eigen::MatrixXd pts = gas::sample_matrix({gas::Marginal::StdNormal, 3}, 2000, rng);
  const gas::MultiIndexSet set(3, 4);
  EXPECT_EQ(gas::build_design_matrix(pts, set, gas::PceBasis::Hermite, Execution::Serial),
            gas::build_design_matrix(pts, set, gas::PceBasis::Hermite, Execution::Parallel));
}

TEST_F(ParallelTest, EstimatorRunsAreBitIdentical) {
  gas::ExperimentConfig cfg;
  cfg.model.set("model", "heston");
  cfg.model.set("vol_paths", static_cast<std::uint64_t>(2));
  cfg.n = 80;
  cfg.m1 = 60;
  cfg.gamma_m1 = 40;
  cfg.gamma_m2 = 2;
  cfg.k = 3;
  cfg.p = 2;
  cfg.master_seed = 18;
  cfg.estimator = gas::Estimator::GAS_PCE;
  const gas::ReferenceValue ref{5.0, 0.0, 1, 0};
  cfg.execution = Execution::Serial;
  const auto serial = gas::run_estimator(cfg, ref);
  cfg.execution = Execution::Parallel;
  const auto parallel = gas::run_estimator(cfg, ref);
  EXPECT_EQ(serial.estimates, parallel.estimates);
  EXPECT_EQ(serial.spectrum, parallel.spectrum);
  EXPECT_EQ(serial.evaluations, parallel.evaluations);

  gas::LinearModel lin(Eigen::Vector3d(1, 2, 3), gas::Marginal::StdNormal);
  const auto rs = gas::reference_value(lin, 5000, 19, Execution::Serial);
  const auto rp = gas::reference_value(lin, 5000, 19, Execution::Parallel);
  EXPECT_EQ(rs.value, rp.value);
  EXPECT_EQ(rs.std_error, rp.std_error);
}

}  // namespace
