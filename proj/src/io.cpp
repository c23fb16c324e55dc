#include "gas/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gas/config.hpp"
#include "gas/error.hpp"
#include "json.hpp"

namespace gas {

using nlohmann::json;

namespace {

json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_num(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw IoError("unexpected string '" + s + "' where a number was expected");
  }
  return j.get<double>();
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Eigen::VectorXd to_vec(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_num(a[i]);
  return v;
}

json row_major(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(num(m(r, c)));
  return a;
}

Eigen::MatrixXd from_row_major(const json& a, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(a.size()) != rows * cols) throw IoError("matrix size does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = to_num(a[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cell(double x) { return format_double(x); }

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw IoError(std::string("JSON document lacks field '") + key + "'");
  return j.at(key).get<T>();
}

json decomposition_json(const SubspaceDecomposition& d) {
  return json{{"lambdas", vec(d.lambdas)},
              {"U", row_major(d.U)},
              {"d", d.U.rows()},
              {"d1", d.d1},
              {"M1", d.m1},
              {"M2", d.m2},
              {"seed", d.seed},
              {"model", d.model}};
}

}  // namespace

// --- JSON ------------------------------------------------------------------

std::string decomposition_to_json(const SubspaceDecomposition& d) { return dump(decomposition_json(d)); }

SubspaceDecomposition decomposition_from_json(std::string_view text) {
  const json j = parse(text);
  SubspaceDecomposition d;
  const auto n = field<Eigen::Index>(j, "d");
  d.lambdas = to_vec(j.at("lambdas"));
  d.U = from_row_major(j.at("U"), n, n);
  d.d1 = field<std::size_t>(j, "d1");
  d.m1 = field<std::size_t>(j, "M1");
  d.m2 = field<std::size_t>(j, "M2");
  d.seed = field<std::uint64_t>(j, "seed");
  d.model = field<std::string>(j, "model");
  return d;
}

std::string gamma_to_json(const GammaEstimates& g) {
  return dump(json{{"gammas", vec(g.gammas)},
                   {"normalized", vec(g.normalized())},
                   {"std_errors", vec(g.std_errors)},
                   {"M1", g.m1},
                   {"M2", g.m2},
                   {"seed", g.seed},
                   {"model", g.model}});
}

GammaEstimates gamma_from_json(std::string_view text) {
  const json j = parse(text);
  GammaEstimates g;
  g.gammas = to_vec(j.at("gammas"));
  g.std_errors = to_vec(j.at("std_errors"));
  g.m1 = field<std::size_t>(j, "M1");
  g.m2 = field<std::size_t>(j, "M2");
  g.seed = field<std::uint64_t>(j, "seed");
  g.model = field<std::string>(j, "model");
  return g;
}

std::string pce_to_json(const PceModel& m) {
  return dump(json{{"basis", to_string(m.basis)},
                   {"degree", m.index_set.degree()},
                   {"dim", m.index_set.dim()},
                   {"indices", m.index_set.indices()},
                   {"coeffs", vec(m.coeffs)},
                   {"training_rms", num(m.training_rms)}});
}

PceModel pce_from_json(std::string_view text) {
  const json j = parse(text);
  PceModel m;
  m.basis = parse_pce_basis(field<std::string>(j, "basis"));
  m.index_set = MultiIndexSet(field<std::size_t>(j, "dim"), field<unsigned>(j, "degree"));
  m.coeffs = to_vec(j.at("coeffs"));
  if (static_cast<std::size_t>(m.coeffs.size()) != m.index_set.size()) {
    throw IoError("PCE document: coefficient count does not match dim/degree");
  }
  m.training_rms = to_num(j.at("training_rms"));
  return m;
}

std::string result_to_json(const EstimatorResult& r, const ExperimentConfig& cfg) {
  json config = json::object();
  const KeyValueConfig flat = cfg.to_config();
  for (const auto& [k, v] : flat.items()) {
    if (k != "output_dir") config[k] = v;
  }
  json failures = r.failures;
  json j{{"estimator", to_string(r.estimator)},
         {"model", r.model},
         {"seed", r.seed},
         {"config", config},
         {"estimates", vec(r.estimates)},
         {"failures", failures},
         {"reference", num(r.reference)},
         {"reference_se", num(r.reference_se)},
         {"d1", r.d1},
         {"spectrum", vec(r.spectrum)},
         {"evaluations", r.evaluations},
         {"clock", to_string(r.clock)},
         {"mse", num(r.mse)}};
  if (r.clock == ClockKind::Evaluations) {
    j["cost"] = num(r.cost);
    j["efficiency"] = num(r.efficiency);
  }
  return dump(j);
}

EstimatorResult result_from_json(std::string_view text) {
  const json j = parse(text);
  EstimatorResult r;
  r.estimator = parse_estimator(field<std::string>(j, "estimator"));
  r.model = field<std::string>(j, "model");
  r.seed = field<std::uint64_t>(j, "seed");
  const Eigen::VectorXd e = to_vec(j.at("estimates"));
  r.estimates.assign(e.data(), e.data() + e.size());
  r.failures = field<std::vector<std::string>>(j, "failures");
  r.reference = to_num(j.at("reference"));
  r.reference_se = to_num(j.at("reference_se"));
  r.d1 = field<std::size_t>(j, "d1");
  r.spectrum = to_vec(j.at("spectrum"));
  r.evaluations = field<std::uint64_t>(j, "evaluations");
  r.clock = parse_clock(field<std::string>(j, "clock"));
  r.mse = to_num(j.at("mse"));
  if (j.contains("cost")) r.cost = to_num(j.at("cost"));
  if (j.contains("efficiency")) r.efficiency = to_num(j.at("efficiency"));
  return r;
}

std::string result_timing_to_json(const EstimatorResult& r) {
  return dump(json{{"estimator", to_string(r.estimator)},
                   {"model", r.model},
                   {"seed", r.seed},
                   {"wall_time", num(r.wall_time)},
                   {"evaluations", r.evaluations},
                   {"mse", num(r.mse)},
                   {"efficiency_wall", num(efficiency(r.wall_time, r.mse))}});
}

std::string heatmap_to_json(const HeatmapGrid& g) {
  json cells = json::array();
  for (const auto& c : g.cells) {
    cells.push_back(json{{"sigma", num(c.sigma)},
                         {"rho", num(c.rho)},
                         {"reference", num(c.reference.value)},
                         {"reference_se", num(c.reference.std_error)},
                         {"mse_gas", num(c.mse_gas)},
                         {"mse_as", num(c.mse_as)},
                         {"eff_gas", num(c.eff_gas)},
                         {"eff_as", num(c.eff_as)},
                         {"mse_ratio", num(c.mse_ratio)},
                         {"eff_ratio", num(c.eff_ratio)},
                         {"error", c.error}});
  }
  return dump(json{{"sigma_values", vec(g.sigma_values)},
                   {"rho_values", vec(g.rho_values)},
                   {"mse_ratio", row_major(g.mse_ratio)},
                   {"eff_ratio", row_major(g.eff_ratio)},
                   {"cells", cells}});
}

std::string noise_study_to_json(const NoiseStudyReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"method", row.method},
                        {"sigma", num(row.sigma)},
                        {"h", num(row.h)},
                        {"m1", row.m1},
                        {"m2", row.m2},
                        {"spectrum", vec(row.spectrum)},
                        {"u1", vec(row.u1)},
                        {"u2", vec(row.u2)},
                        {"cos1", num(row.cos1)},
                        {"cos2", num(row.cos2)}});
  }
  return dump(json{{"rows", rows}});
}

std::string ebola_to_json(const EbolaReport& r) {
  json as = decomposition_json(r.as);
  as["normalized"] = vec(r.as.normalized());
  json gas = decomposition_json(r.gas);
  gas["normalized"] = vec(r.gas.normalized());
  json names = json::array();
  for (const auto& p : ebola_liberia_ranges()) names.push_back(p.name);
  return dump(json{{"parameters", names}, {"as", as}, {"gas", gas}});
}

std::string sobol_indices_to_json(const SobolIndexEstimates& s, const std::string& model, std::uint64_t seed) {
  return dump(json{{"indices", vec(s.indices)},
                   {"std_errors", vec(s.std_errors)},
                   {"variance", num(s.variance)},
                   {"samples", s.samples},
                   {"model", model},
                   {"seed", seed}});
}

// --- CSV -------------------------------------------------------------------

std::string result_to_csv(const EstimatorResult& r) {
  std::ostringstream os;
  os << "replication,estimate\n";
  for (std::size_t i = 0; i < r.estimates.size(); ++i) os << i << "," << cell(r.estimates[i]) << "\n";
  return os.str();
}

std::string heatmap_to_csv(const HeatmapGrid& g) {
  std::ostringstream os;
  os << "sigma,rho,mse_ratio,eff_ratio\n";
  for (std::size_t a = 0; a < g.sigma_values.size(); ++a) {
    for (std::size_t b = 0; b < g.rho_values.size(); ++b) {
      const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
      os << cell(g.sigma_values[a]) << "," << cell(g.rho_values[b]) << "," << cell(g.mse_ratio(ia, ib)) << ","
         << cell(g.eff_ratio(ia, ib)) << "\n";
    }
  }
  return os.str();
}

std::string noise_study_to_csv(const NoiseStudyReport& r) {
  std::ostringstream os;
  const Eigen::Index d = r.rows.empty() ? 0 : r.rows.front().u1.size();
  os << "method,sigma,h,m1,m2,cos1,cos2";
  for (const char* prefix : {"spectrum_", "u1_", "u2_"})
    for (Eigen::Index i = 1; i <= d; ++i) os << "," << prefix << i;
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.method << "," << cell(row.sigma) << "," << cell(row.h) << "," << row.m1 << "," << row.m2 << ","
       << cell(row.cos1) << "," << cell(row.cos2);
    for (const Eigen::VectorXd* v : {&row.spectrum, &row.u1, &row.u2})
      for (Eigen::Index i = 0; i < v->size(); ++i) os << "," << cell((*v)(i));
    os << "\n";
  }
  return os.str();
}

std::string spectrum_to_csv(const SubspaceDecomposition& d) {
  std::ostringstream os;
  const Eigen::VectorXd norm = d.normalized();
  os << "index,lambda,normalized";
  for (Eigen::Index i = 1; i <= d.U.rows(); ++i) os << ",u_" << i;
  os << "\n";
  for (Eigen::Index k = 0; k < d.lambdas.size(); ++k) {
    os << k + 1 << "," << cell(d.lambdas(k)) << "," << cell(norm(k));
    for (Eigen::Index i = 0; i < d.U.rows(); ++i) os << "," << cell(d.U(i, k));
    os << "\n";
  }
  return os.str();
}

std::string gamma_to_csv(const GammaEstimates& g) {
  std::ostringstream os;
  const Eigen::VectorXd norm = g.normalized();
  os << "index,gamma,normalized,std_error\n";
  for (Eigen::Index k = 0; k < g.gammas.size(); ++k) {
    os << k + 1 << "," << cell(g.gammas(k)) << "," << cell(norm(k)) << "," << cell(g.std_errors(k)) << "\n";
  }
  return os.str();
}

std::string summary_to_csv(const Eigen::MatrixXd& table) {
  std::ostringstream os;
  const Eigen::Index k = table.cols() - 1;
  for (Eigen::Index c = 0; c < k; ++c) os << "w" << c + 1 << ",";
  os << "f\n";
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) os << (c ? "," : "") << cell(table(r, c));
    os << "\n";
  }
  return os.str();
}

std::string ebola_to_csv(const EbolaReport& r) {
  std::ostringstream os;
  const Eigen::VectorXd an = r.as.normalized(), gn = r.gas.normalized();
  const auto& names = ebola_liberia_ranges();
  os << "index,parameter,as_normalized,as_u1,gas_normalized,gas_u1\n";
  for (Eigen::Index i = 0; i < an.size(); ++i) {
    os << i + 1 << "," << names[static_cast<std::size_t>(i)].name << "," << cell(an(i)) << "," << cell(r.as.U(i, 0))
       << "," << cell(gn(i)) << "," << cell(r.gas.U(i, 0)) << "\n";
  }
  return os.str();
}

std::string sobol_indices_to_csv(const SobolIndexEstimates& s) {
  std::ostringstream os;
  os << "index,upper_sobol,std_error\n";
  for (Eigen::Index i = 0; i < s.indices.size(); ++i) {
    os << i + 1 << "," << cell(s.indices(i)) << "," << cell(s.std_errors(i)) << "\n";
  }
  return os.str();
}

// --- files -----------------------------------------------------------------

std::string output_stem(const std::string& model, const std::string& estimator, std::uint64_t seed) {
  return model + "_" + estimator + "_seed" + std::to_string(seed);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gas
