#pragma once

// Line-oriented "key = value" configuration. Command-line values are entries
// with line 0 and win over file entries.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "igr/errors.hpp"
#include "igr/output.hpp"
#include "igr/presets.hpp"

namespace igr {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

inline double parse_real(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(ConfigError::Kind::TypeError, e.key, e.line, "expected a real number, got '" + v + "'");
  }
  return out;
}

inline int parse_int(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(ConfigError::Kind::TypeError, e.key, e.line, "expected an integer, got '" + v + "'");
  }
  return out;
}

inline std::vector<double> parse_real_list(const ConfigEntry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real({e.key, item, e.line}));
  return out;
}

}  // namespace detail

/// Entries of a config text. Blank lines and '#' comments are skipped.
inline std::vector<ConfigEntry> read_config(std::istream& is) {
  std::vector<ConfigEntry> out;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigError::Kind::TypeError, text, line, "expected 'key = value'");
    }
    const std::string key = detail::trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(ConfigError::Kind::TypeError, "", line, "empty key");
    out.push_back({key, detail::trim(text.substr(eq + 1)), line});
  }
  return out;
}

inline std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path.string());
  return read_config(is);
}

struct ResolvedConfig {
  ExperimentPreset preset;
  std::string out_dir = "out";
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"preset", "n",   "alpha",  "alpha-scaling", "scheme",
                                                "a",      "gamma", "cfl",  "t-end",         "snapshot-times",
                                                "n-ref",  "out"};
  return keys;
}

/// Preset defaults with file entries applied, then command-line entries.
/// An explicit alpha is the value at the resolved n; changing n alone keeps
/// the preset's alpha law.
inline ResolvedConfig resolve_config(const std::vector<ConfigEntry>& file, const std::vector<ConfigEntry>& cli = {}) {
  std::vector<ConfigEntry> all;
  for (const auto& e : file) all.push_back({detail::canonical_key(e.key), e.value, e.line});
  for (const auto& e : cli) all.push_back({detail::canonical_key(e.key), e.value, 0});

  for (const auto& e : all) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
      throw ConfigError(ConfigError::Kind::UnknownKey, e.key, e.line, "unknown key");
    }
  }
  // Last entry per key wins; command-line entries come last.
  auto latest = [&](const std::string& key) -> std::optional<ConfigEntry> {
    std::optional<ConfigEntry> found;
    for (const auto& e : all) {
      if (e.key == key) found = e;
    }
    return found;
  };

  const auto name = latest("preset");
  if (!name) throw ConfigError(ConfigError::Kind::MissingRequired, "preset", 0, "no preset given");
  auto base = find_preset(detail::trim(name->value));
  if (!base) {
    throw ConfigError(ConfigError::Kind::TypeError, "preset", name->line, "unknown preset '" + name->value + "'");
  }
  ResolvedConfig out;
  ExperimentPreset& p = out.preset;
  p = *base;

  auto positive = [](const ConfigEntry& e, double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(ConfigError::Kind::TypeError, e.key, e.line, std::string("must be ") + what);
  };

  if (auto e = latest("alpha-scaling")) {
    const auto s = alpha_scaling_from_string(detail::trim(e->value));
    if (!s) throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "expected quadratic or fixed");
    p.alpha_scaling = *s;
  }
  if (auto e = latest("n")) {
    const int n = detail::parse_int(*e);
    positive(*e, n, "positive");
    p.alpha = p.alpha_at(n);
    p.n = n;
  }
  if (auto e = latest("alpha")) {
    const double a = detail::parse_real(*e);
    if (!(a >= 0.0)) throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "must be non-negative");
    p.alpha = a;
    if (!p.sweep_alpha.empty()) p.sweep_alpha = {a};
  }
  if (auto e = latest("scheme")) {
    const auto s = scheme_from_string(detail::trim(e->value));
    if (!s) throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "expected lf, lw, lw-igr or mixed-igr");
    p.scheme = *s;
  }
  if (auto e = latest("a")) {
    p.a = detail::parse_real(*e);
    positive(*e, p.a, "positive");
    p.sweep_a.clear();
  }
  if (auto e = latest("gamma")) {
    p.gamma = detail::parse_real(*e);
    if (!(p.gamma >= 1.0)) throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "must be at least 1");
  }
  if (auto e = latest("cfl")) {
    p.cfl = detail::parse_real(*e);
    if (!(p.cfl > 0.0 && p.cfl <= 1.0)) {
      throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "must lie in (0, 1]");
    }
  }
  if (auto e = latest("t-end")) {
    p.t_end = detail::parse_real(*e);
    positive(*e, p.t_end, "positive");
    std::erase_if(p.snapshot_times, [&](double t) { return t > p.t_end; });
  }
  if (auto e = latest("snapshot-times")) {
    auto times = detail::parse_real_list(*e);
    std::sort(times.begin(), times.end());
    for (double t : times) {
      if (t < 0.0 || t > p.t_end) {
        throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "times must lie in [0, t-end]");
      }
    }
    p.snapshot_times = times;
  }
  if (auto e = latest("n-ref")) {
    p.n_ref = detail::parse_int(*e);
    if (p.n_ref < 0) throw ConfigError(ConfigError::Kind::TypeError, e->key, e->line, "must be non-negative");
  }
  if (auto e = latest("out")) out.out_dir = detail::trim(e->value);

  try {
    p.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ConfigError::Kind::TypeError, "preset", 0, ex.what());
  }
  return out;
}

/// Every resolved key with its value, in a fixed order.
inline Metadata describe(const ExperimentPreset& p) {
  std::string times;
  for (double t : p.snapshot_times) times += (times.empty() ? "" : ",") + format_number(t);
  return {{"preset", p.name},
          {"n", std::to_string(p.n)},
          {"alpha", format_number(p.alpha)},
          {"alpha-scaling", to_string(p.alpha_scaling)},
          {"scheme", to_string(p.scheme)},
          {"a", format_number(p.a)},
          {"gamma", format_number(p.gamma)},
          {"cfl", format_number(p.cfl)},
          {"t-end", format_number(p.t_end)},
          {"snapshot-times", times},
          {"n-ref", std::to_string(p.n_ref)}};
}

}  // namespace igr
