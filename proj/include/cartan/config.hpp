#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cartan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. Blank lines and lines starting with '#' are
/// ignored; later keys override earlier ones.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool has(std::string_view key) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string getString(std::string_view key, const std::string& fallback) const;
  long getInt(std::string_view key, long fallback) const;
  double getDouble(std::string_view key, double fallback) const;
  std::vector<long> getIntList(std::string_view key) const;
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace cartan
