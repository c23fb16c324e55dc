#include <fstream>
#include <sstream>

#include "gas/error.hpp"
#include "gas/sampling.hpp"

namespace gas {

namespace detail {
extern const std::string_view kJoeKuoTable;
}

DirectionTable DirectionTable::parse(std::string_view text) {
  DirectionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t expected = 2;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header) {  // "d s a m_i"
      header = false;
      continue;
    }
    std::istringstream row(line);
    std::size_t d = 0;
    Entry e;
    if (!(row >> d >> e.degree >> e.coeffs) || d != expected || e.degree == 0 ||
        e.degree >= SobolGenerator::kBits) {
      throw ConfigError("malformed direction-number row for dimension " +
                        std::to_string(expected) + ": '" + line + "'");
    }
    e.initial.resize(e.degree);
    for (auto& m : e.initial) {
      if (!(row >> m)) throw ConfigError("missing m_i in direction-number row " + std::to_string(d));
      if (m % 2 == 0) throw ConfigError("direction number m_i must be odd (row " + std::to_string(d) + ")");
    }
    table.entries_.push_back(std::move(e));
    ++expected;
  }
  return table;
}

DirectionTable DirectionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open direction-number table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string_view DirectionTable::bundled_text() { return detail::kJoeKuoTable; }

const DirectionTable& DirectionTable::joe_kuo() {
  static const DirectionTable table = parse(detail::kJoeKuoTable);
  return table;
}

SobolGenerator::SobolGenerator(std::size_t dimension, const DirectionTable& table)
    : dimension_(dimension) {
  if (dimension == 0) throw ConfigError("Sobol' dimension must be positive");
  if (dimension > table.max_dimension()) {
    throw ConfigError("Sobol' dimension " + std::to_string(dimension) +
                      " exceeds direction-number table (" +
                      std::to_string(table.max_dimension()) + ")");
  }
  directions_.resize(dimension);
  // v[k] holds V_{k+1} of the Joe-Kuo construction, scaled to kBits bits.
  for (unsigned k = 0; k < kBits; ++k) directions_[0][k] = 1u << (kBits - 1 - k);
  for (std::size_t j = 1; j < dimension; ++j) {
    const auto& e = table.entry(j);
    auto& v = directions_[j];
    const unsigned s = e.degree;
    for (unsigned k = 0; k < s; ++k) v[k] = e.initial[k] << (kBits - 1 - k);
    for (unsigned k = s; k < kBits; ++k) {
      v[k] = v[k - s] ^ (v[k - s] >> s);
      for (unsigned t = 1; t < s; ++t) {
        if ((e.coeffs >> (s - 1 - t)) & 1u) v[k] ^= v[k - t];
      }
    }
  }
  state_.assign(dimension, 0u);
}

void SobolGenerator::reset() {
  std::fill(state_.begin(), state_.end(), 0u);
  counter_ = 0;
}

void SobolGenerator::next(std::span<double> out) {
  if (out.size() != dimension_) throw ConfigError("Sobol' output span has wrong size");
  if (counter_ >= (std::uint64_t{1} << kBits) - 1) {
    throw ConfigError("Sobol' sequence exhausted (2^32 - 1 points)");
  }
  // Raw index n = counter_ + 1; flip the direction at the lowest zero bit of n - 1.
  std::uint64_t value = counter_;
  unsigned c = 0;
  while (value & 1u) {
    value >>= 1;
    ++c;
  }
  constexpr double scale = 0x1.0p-32;
  for (std::size_t j = 0; j < dimension_; ++j) {
    state_[j] ^= directions_[j][c];
    out[j] = static_cast<double>(state_[j]) * scale;
  }
  ++counter_;
}

Eigen::VectorXd SobolGenerator::next() {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dimension_));
  next(std::span<double>(x.data(), dimension_));
  return x;
}

Eigen::MatrixXd SobolGenerator::take(std::size_t count) {
  Eigen::MatrixXd points(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dimension_));
  Eigen::VectorXd row(static_cast<Eigen::Index>(dimension_));
  for (std::size_t i = 0; i < count; ++i) {
    next(std::span<double>(row.data(), dimension_));
    points.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return points;
}

}  // namespace gas
