#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "gas/bench.hpp"
#include "gas/pce.hpp"
#include "gas/subspace.hpp"

namespace gas {

// JSON documents. Non-finite reals are written as null (NaN) or the strings
// "inf" / "-inf". Matrices are stored row-major as flat arrays with their
// shape alongside.

/// {"lambdas", "U" (row-major), "d", "d1", "M1", "M2", "seed", "model"}.
std::string decomposition_to_json(const SubspaceDecomposition& d);
SubspaceDecomposition decomposition_from_json(std::string_view text);

/// {"gammas", "std_errors", "M1", "M2", "seed", "model"}.
std::string gamma_to_json(const GammaEstimates& g);
GammaEstimates gamma_from_json(std::string_view text);

/// {"basis", "degree", "dim", "indices", "coeffs", "training_rms"}.
std::string pce_to_json(const PceModel& m);
PceModel pce_from_json(std::string_view text);

/// Estimator run. Quantities that depend on the wall clock are left out
/// so the document is reproducible; see result_timing_to_json.
std::string result_to_json(const EstimatorResult& r, const ExperimentConfig& cfg);
EstimatorResult result_from_json(std::string_view text);
std::string result_timing_to_json(const EstimatorResult& r);

std::string heatmap_to_json(const HeatmapGrid& g);
std::string noise_study_to_json(const NoiseStudyReport& r);
std::string ebola_to_json(const EbolaReport& r);
std::string sobol_indices_to_json(const SobolIndexEstimates& s, const std::string& model, std::uint64_t seed);

// CSV tables.

/// replication,estimate
std::string result_to_csv(const EstimatorResult& r);
/// sigma,rho,mse_ratio,eff_ratio
std::string heatmap_to_csv(const HeatmapGrid& g);
/// method,sigma,h,m1,m2,cos1,cos2,spectrum_1..d,u1_1..d,u2_1..d
std::string noise_study_to_csv(const NoiseStudyReport& r);
/// index,lambda,normalized,u_1..u_d (one row per eigenpair)
std::string spectrum_to_csv(const SubspaceDecomposition& d);
/// index,gamma,normalized,std_error
std::string gamma_to_csv(const GammaEstimates& g);
/// w1[,w2],f
std::string summary_to_csv(const Eigen::MatrixXd& table);
/// index,as_normalized,as_u1,gas_normalized,gas_u1
std::string ebola_to_csv(const EbolaReport& r);
/// index,upper_sobol,std_error
std::string sobol_indices_to_csv(const SobolIndexEstimates& s);

/// "<model>_<estimator>_seed<seed>".
std::string output_stem(const std::string& model, const std::string& estimator, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gas
