#include "pdflow/config.hpp"

#include <fstream>
#include <sstream>

namespace pdflow {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

IniConfig IniConfig::parse(const std::string& text) {
  IniConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    }
    auto& sec = cfg.sections_[section];
    const auto existing = sec.find(key);
    if (existing != sec.end()) {
      throw ConfigError("duplicate key '" + key + "' at lines " +
                        std::to_string(existing->second.line) + " and " +
                        std::to_string(lineno));
    }
    sec[key] = Entry{value, lineno, false};
  }
  return cfg;
}

IniConfig IniConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const IniConfig::Entry* IniConfig::find(const std::string& section,
                                        const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return nullptr;
  kit->second.consumed = true;
  return &kit->second;
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  return sit != sections_.end() && sit->second.count(key) > 0;
}

std::string IniConfig::get_string(const std::string& section,
                                  const std::string& key,
                                  std::optional<std::string> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  return e->value;
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             std::optional<double> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  try {
    size_t pos = 0;
    const double v = std::stod(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                      "' expects a number, got '" + e->value + "'");
  }
}

long IniConfig::get_long(const std::string& section, const std::string& key,
                         std::optional<long> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  try {
    size_t pos = 0;
    const long v = std::stol(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                      "' expects an integer, got '" + e->value + "'");
  }
}

bool IniConfig::get_bool(const std::string& section, const std::string& key,
                         std::optional<bool> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                    "' expects true/false, got '" + e->value + "'");
}

Vector IniConfig::get_vector(const std::string& section, const std::string& key,
                             std::optional<Vector> fallback) const {
  const Entry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  }
  std::vector<double> vals;
  std::stringstream ss(e->value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                        "' expects comma-separated numbers, got '" + e->value +
                        "'");
    }
  }
  if (vals.empty()) {
    throw ConfigError("line " + std::to_string(e->line) + ": key '" + key +
                      "' is an empty vector");
  }
  Vector v(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) v(i) = vals[i];
  return v;
}

void IniConfig::check_all_consumed() const {
  for (const auto& [sec, entries] : sections_) {
    for (const auto& [key, entry] : entries) {
      if (!entry.consumed) {
        throw ConfigError("line " + std::to_string(entry.line) +
                          ": unknown key '" + key + "' in section [" + sec + "]");
      }
    }
  }
}

}  // namespace pdflow
