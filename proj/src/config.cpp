#include "routeplace/config.hpp"

#include <algorithm>
#include <charconv>

namespace routeplace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T convert(const std::string &key, const std::string &v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[std::string(key)] = std::string(value);
  }
  return cfg;
}

double KeyValueConfig::get_double(const std::string &key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : convert<double>(key, it->second);
}

long long KeyValueConfig::get_int(const std::string &key, long long fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : convert<long long>(key, it->second);
}

unsigned long long KeyValueConfig::get_u64(const std::string &key, unsigned long long fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : convert<unsigned long long>(key, it->second);
}

bool KeyValueConfig::get_bool(const std::string &key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string &v = it->second;
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string KeyValueConfig::get_string(const std::string &key, const std::string &fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void KeyValueConfig::reject_unknown(std::initializer_list<std::string_view> known) const {
  for (const auto &[k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

std::string KeyValueConfig::to_string() const {
  std::string out;
  for (const auto &[k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace routeplace
