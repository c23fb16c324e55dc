#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gas {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// Counter-based generator (Philox4x32-10).
///
/// A stream is fully identified by `(seed, stream_id)`: the seed forms the
/// cipher key and the stream id occupies the upper half of the 128-bit
/// counter, so distinct ids never overlap. Parallel code creates one stream
/// per worker or per sample via `derive`.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal draw (Box-Muller; the second variate is cached).
  double normal();

  /// Child stream keyed by this stream's identity and `tag`. Does not advance
  /// this stream, so derived streams are independent of consumption order.
  RngStream derive(std::uint64_t tag) const;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned buffer_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t mix64(std::uint64_t x);

// ---------------------------------------------------------------------------
// Sobol' sequence
// ---------------------------------------------------------------------------

/// Primitive-polynomial data for the Sobol' direction numbers, in the
/// Joe-Kuo text layout (`d s a m_1 .. m_s`, first dimension implicit).
class DirectionTable {
 public:
  struct Entry {
    unsigned degree = 0;         // s
    std::uint32_t coeffs = 0;    // a
    std::vector<std::uint32_t> initial;  // m_1 .. m_s
  };

  static DirectionTable parse(std::string_view text);
  static DirectionTable load(const std::string& path);

  /// The bundled table (1024 dimensions).
  static const DirectionTable& joe_kuo();

  /// Raw text of the bundled table, as shipped in data/.
  static std::string_view bundled_text();

  std::size_t max_dimension() const noexcept { return entries_.size() + 1; }

  /// Entry for zero-based dimension `dim >= 1`.
  const Entry& entry(std::size_t dim) const { return entries_.at(dim - 1); }

 private:
  std::vector<Entry> entries_;
};

/// Gray-code Sobol' generator over [0,1)^d.
///
/// The all-zero point of the raw sequence is never emitted: the first call
/// to `next` returns (0.5, ..., 0.5).
class SobolGenerator {
 public:
  static constexpr unsigned kBits = 32;

  explicit SobolGenerator(std::size_t dimension,
                          const DirectionTable& table = DirectionTable::joe_kuo());

  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t counter() const noexcept { return counter_; }

  Eigen::VectorXd next();
  void next(std::span<double> out);

  /// First `count` points as rows of a count x d matrix.
  Eigen::MatrixXd take(std::size_t count);

  void reset();

 private:
  std::size_t dimension_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
  std::vector<std::uint32_t> state_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Standard normal CDF / quantile
// ---------------------------------------------------------------------------

double norm_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS 241, PPND16).
/// Throws DomainError unless 0 < u < 1.
double norm_quantile(double u);

// ---------------------------------------------------------------------------
// Input measures
// ---------------------------------------------------------------------------

enum class Marginal { StdNormal, UnitUniform };

std::string to_string(Marginal m);
Marginal parse_marginal(std::string_view name);

/// Product measure F(z) = F_1(z_1) ... F_d(z_d) with identical marginals.
struct InputDistribution {
  Marginal kind = Marginal::StdNormal;
  std::size_t dimension = 1;

  double cdf(double x) const;
  double quantile(double u) const;
  double draw(RngStream& rng) const;
};

/// Rows are i.i.d. draws from `dist`, filled row by row from `rng`.
Eigen::MatrixXd sample_matrix(const InputDistribution& dist, std::size_t n, RngStream& rng);

/// (x + shift) mod 1, componentwise, for each row x of `base`.
Eigen::MatrixXd shift_points(const Eigen::MatrixXd& base, const Eigen::VectorXd& shift);

/// Draws `count` points from `gen` and shifts them by `shift` modulo 1.
Eigen::MatrixXd shifted_sobol_points(SobolGenerator& gen, std::size_t count,
                                     const Eigen::VectorXd& shift);

/// Fractional part in [0, 1).
double wrap_unit(double x);

}  // namespace gas
