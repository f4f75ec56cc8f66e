#include "kgwell/config.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace kgwell {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  if (trim(text.substr(used)) != "") throw ConfigError("key '" + key + "': trailing characters in '" + text + "'");
  return x;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& is) {
  KeyValueConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

bool KeyValueConfig::has_section(const std::string& prefix) const {
  const std::string p = prefix + ".";
  const auto it = values_.lower_bound(p);
  return it != values_.end() && it->first.compare(0, p.size(), p) == 0;
}

const std::string& KeyValueConfig::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

double KeyValueConfig::require_double(const std::string& key) const { return to_double(key, require(key)); }

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const double x = to_double(key, *v);
  if (x != static_cast<double>(static_cast<long>(x))) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<long>(x);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
  if (s == "off" || s == "false" || s == "no" || s == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + *v + "'");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto v = get(key);
  return v ? *v : fallback;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::string text = *v;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(to_double(key, token));
  return out;
}

void KeyValueConfig::write(std::ostream& os) const {
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
}

}  // namespace kgwell
