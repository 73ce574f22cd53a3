#include "gbspec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gbspec/numutil.hpp"

namespace gbspec {

namespace {

// Master key schema: section -> known keys.  Unknown keys are rejected at
// load time so typos cannot silently fall back to defaults.
const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> schema = {
      {"potential", {"family", "amplitude", "radius", "ramp"}},
      {"grid", {"h", "n"}},
      {"eig", {"residual_tol", "max_iter"}},
      {"bands", {"momentum_grid", "nbands"}},
      {"flow", {"n", "t_steps", "energies", "crossing_tol"}},
      {"fill", {"eps", "thetas", "n", "m_max", "apx_n", "energy_frac"}},
      {"scaling", {"kind", "theta", "alpha", "beta", "n_list"}},
      {"align", {"theta", "t", "eps", "mmax"}},
      {"muffin",
       {"r", "theta", "ymax", "h", "heights", "box", "track_lo", "track_hi",
        "scheme"}},
      {"decouple", {"r", "theta", "box", "h", "heights"}},
  };
  return schema;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(raw, &used);
    return used == raw.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace

double parse_mesh(const std::string& raw) {
  double h = 0.0;
  const auto slash = raw.find('/');
  if (slash != std::string::npos) {
    double num = 0, den = 0;
    if (!parse_double(trim(raw.substr(0, slash)), num) ||
        !parse_double(trim(raw.substr(slash + 1)), den) || den == 0.0)
      throw ConfigError("mesh value '" + raw + "' is not a valid fraction");
    h = num / den;
  } else if (!parse_double(raw, h)) {
    throw ConfigError("mesh value '" + raw + "' is not a number");
  }
  if (!(h > 0.0)) throw ConfigError("mesh width must be positive");
  const double inv = 1.0 / h;
  if (std::abs(inv - std::round(inv)) > 1e-9 * inv)
    throw ConfigError("mesh rule violated: 1/h must be a positive integer (got h = " +
                      raw + ")");
  return h;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  ExperimentConfig cfg;
  cfg.path_ = path;
  cfg.hash_ = fnv1a(text.data(), text.size());

  std::vector<std::string> errors;
  std::map<std::string, int> first_line;  // duplicate detection
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (known_keys().find(section) == known_keys().end())
        errors.push_back("line " + std::to_string(lineno) + ": unknown section [" +
                         section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (section.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": key '" + key +
                       "' outside any [section]");
      continue;
    }
    const auto ks = known_keys().find(section);
    if (ks != known_keys().end()) {
      bool known = false;
      for (const auto& k : ks->second)
        if (k == key) known = true;
      if (!known) {
        errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key +
                         "' in section [" + section + "]");
        continue;
      }
    }
    const std::string full = section + "." + key;
    const auto dup = first_line.find(full);
    if (dup != first_line.end()) {
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + full +
                       "' (first set at line " + std::to_string(dup->second) + ")");
      continue;
    }
    first_line[full] = lineno;
    cfg.entries[full] = {value, lineno, false};
  }

  // Eager value validation for the fields with hard module preconditions.
  auto check = [&](const std::string& full, auto&& fn) {
    const auto it = cfg.entries.find(full);
    if (it == cfg.entries.end()) return;
    try {
      fn(it->second.raw);
    } catch (const std::exception& e) {
      errors.push_back("line " + std::to_string(it->second.line) + ": " + e.what());
    }
  };
  check("grid.h", [](const std::string& raw) { parse_mesh(raw); });
  check("muffin.h", [](const std::string& raw) { parse_mesh(raw); });
  check("decouple.h", [](const std::string& raw) { parse_mesh(raw); });
  check("potential.family", [](const std::string& raw) {
    if (raw != "cosine" && raw != "muffin" && raw != "flat")
      throw ConfigError("potential.family must be cosine, muffin or flat");
  });
  check("potential.amplitude", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || v < 0.0)
      throw ConfigError("potential.amplitude must be a number >= 0");
  });
  check("grid.n", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || v < 1.0 || v != std::floor(v))
      throw ConfigError("grid.n must be an integer >= 1");
  });
  check("align.t", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v > 0.0) || !(v < 1.0))
      throw ConfigError("align.t must lie in (0, 1)");
  });
  check("align.eps", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v > 0.0))
      throw ConfigError("align.eps must be positive");
  });
  check("align.theta", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v >= 0.0) || !(v < 1.5707963267948966))
      throw ConfigError("align.theta must lie in [0, pi/2)");
  });
  check("muffin.r", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v > 0.0) || !(v < 0.5))
      throw ConfigError("muffin.r must lie in (0, 1/2)");
  });
  check("decouple.r", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v > 0.0) || !(v < 0.5))
      throw ConfigError("decouple.r must lie in (0, 1/2)");
  });
  check("eig.residual_tol", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || !(v > 0.0))
      throw ConfigError("eig.residual_tol must be positive");
  });
  check("eig.max_iter", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || v < 1.0 || v != std::floor(v))
      throw ConfigError("eig.max_iter must be an integer >= 1");
  });
  check("flow.t_steps", [](const std::string& raw) {
    double v;
    if (!parse_double(raw, v) || v < 16.0 || v != std::floor(v))
      throw ConfigError("flow.t_steps must be an integer >= 16");
  });

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  return entries.find(section + "." + key) != entries.end();
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key,
                                    double fallback) const {
  const auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  double v;
  if (!parse_double(it->second.raw, v))
    throw ConfigError("line " + std::to_string(it->second.line) + ": '" + section +
                      "." + key + "' is not a number");
  it->second.used = true;
  return v;
}

long ExperimentConfig::get_int(const std::string& section, const std::string& key,
                               long fallback) const {
  const double v = get_double(section, key, static_cast<double>(fallback));
  if (v != std::floor(v))
    throw ConfigError("'" + section + "." + key + "' must be an integer");
  return static_cast<long>(v);
}

std::string ExperimentConfig::get_string(const std::string& section,
                                         const std::string& key,
                                         const std::string& fallback) const {
  const auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  it->second.used = true;
  return it->second.raw;
}

std::vector<double> ExperimentConfig::get_list(const std::string& section,
                                               const std::string& key,
                                               const std::vector<double>& fallback) const {
  const auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second.raw);
  std::string token;
  while (std::getline(ss, token, ',')) {
    double v;
    if (!parse_double(trim(token), v))
      throw ConfigError("line " + std::to_string(it->second.line) + ": '" + section +
                        "." + key + "' has a non-numeric entry '" + token + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw ConfigError("'" + section + "." + key + "' is an empty list");
  it->second.used = true;
  return out;
}

double ExperimentConfig::get_mesh(const std::string& section, const std::string& key,
                                  double fallback) const {
  const auto it = entries.find(section + "." + key);
  if (it == entries.end()) return fallback;
  it->second.used = true;
  return parse_mesh(it->second.raw);
}

}  // namespace gbspec
