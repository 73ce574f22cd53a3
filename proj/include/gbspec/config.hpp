#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbspec/errors.hpp"

namespace gbspec {

// Plain "[section]" / "key = value" experiment configuration.  Parsing
// collects every error (syntax, duplicate keys, unknown keys, bad values)
// and reports them all in one ConfigError.
class ExperimentConfig {
 public:
  struct Entry {
    std::string raw;
    int line = 0;
    mutable bool used = false;
  };

  bool has(const std::string& section, const std::string& key) const;

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_int(const std::string& section, const std::string& key,
               long fallback) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  // Mesh widths accept decimals or "1/q"; 1/h must be an integer.
  double get_mesh(const std::string& section, const std::string& key,
                  double fallback) const;

  std::uint64_t hash() const { return hash_; }
  const std::string& path() const { return path_; }

  // Internal: populated by load_config.
  std::map<std::string, Entry> entries;  // key: "section.key"

 private:
  friend ExperimentConfig load_config(const std::string& path);
  std::uint64_t hash_ = 0;
  std::string path_;
};

ExperimentConfig load_config(const std::string& path);

// Validates mesh syntax: returns h > 0 with integer 1/h, or throws.
double parse_mesh(const std::string& raw);

}  // namespace gbspec
