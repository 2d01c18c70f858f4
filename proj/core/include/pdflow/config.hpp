#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdflow/types.hpp"

namespace pdflow {

/// Config parse/validation failure; message carries line numbers.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// INI-style key-value configuration: [section] headers, key = value lines,
/// '#' or ';' comments. Duplicate keys and unknown keys are errors.
class IniConfig {
 public:
  static IniConfig parse(const std::string& text);
  static IniConfig parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = {}) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = {}) const;
  long get_long(const std::string& section, const std::string& key,
                std::optional<long> fallback = {}) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = {}) const;
  Vector get_vector(const std::string& section, const std::string& key,
                    std::optional<Vector> fallback = {}) const;

  /// Throws if any key was never read by a get_* call.
  void check_all_consumed() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
  const Entry* find(const std::string& section, const std::string& key) const;
};

}  // namespace pdflow
