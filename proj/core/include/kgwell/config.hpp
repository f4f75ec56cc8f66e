#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgwell {

/// Flat `key = value` configuration. A `[section]` line prefixes the keys
/// that follow it with `section.`; dotted keys may also be written out in
/// full. `#` starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is);
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// True when any key starts with `prefix.`.
  bool has_section(const std::string& prefix) const;

  /// Throws ConfigError naming the key when it is absent.
  const std::string& require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Canonical `key = value` listing, sorted by key.
  void write(std::ostream& os) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace kgwell
