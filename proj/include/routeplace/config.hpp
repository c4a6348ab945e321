#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace routeplace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text `key = value` pairs with `#` comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);

  bool has(const std::string &key) const { return values_.count(key) != 0; }
  void set(const std::string &key, const std::string &value) { values_[key] = value; }

  double get_double(const std::string &key, double fallback) const;
  long long get_int(const std::string &key, long long fallback) const;
  unsigned long long get_u64(const std::string &key, unsigned long long fallback) const;
  bool get_bool(const std::string &key, bool fallback) const;
  std::string get_string(const std::string &key, const std::string &fallback) const;

  /// Throws ConfigError naming the first key not in `known`.
  void reject_unknown(std::initializer_list<std::string_view> known) const;

  const std::map<std::string, std::string> &values() const { return values_; }
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace routeplace
