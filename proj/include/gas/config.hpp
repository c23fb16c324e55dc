#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gas {

/// Flat `key = value` configuration.
///
/// Text form: one pair per line, `#` starts a comment, keys are unique and
/// kept in sorted order so that serialization is canonical.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  std::string serialize() const;

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, const std::vector<double>& values);

  /// Copies every pair of `other`, overriding existing keys.
  void merge(const KeyValueConfig& other);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of reals.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  const std::map<std::string, std::string>& items() const noexcept { return values_; }

  friend bool operator==(const KeyValueConfig&, const KeyValueConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double x);

/// 64-bit FNV-1a digest.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace gas
