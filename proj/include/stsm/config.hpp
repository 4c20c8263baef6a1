#pragma once

#include <charconv>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "stsm/analysis.hpp"
#include "stsm/errors.hpp"
#include "stsm/model.hpp"

namespace stsm {

struct ConfigKey {
  std::string name; ///< "section.key"
  std::string fallback;
  std::string help;
};

/// Every accepted key with its default. Anything else in a file is an error.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    const auto bbo = SellmeierSet::bbo_eimerl();
    auto num = [](double v) {
      char buf[64];
      auto r = std::to_chars(buf, buf + sizeof buf, v);
      return std::string(buf, r.ptr);
    };
    return std::vector<ConfigKey>{
        {"run.regime", "low-gain", "low-gain or high-gain"},
        {"run.state", "spdc", "spdc or separable (product-Gaussian reference state)"},
        {"run.output_dir", "stsm_out", "directory for artifacts"},
        {"run.workers", "1", "worker threads"},
        {"grid.nq", "12", "radial samples"},
        {"grid.nw", "12", "frequency samples"},
        {"grid.m", "25", "relative-angle samples"},
        {"grid.q_max", "3.5e5", "radial window (rad/m)"},
        {"grid.omega_half_width", "1e13", "frequency half window around omega_p0/2 (rad/s)"},
        {"pump.lambda_p0", "355e-9", "central pump wavelength (m)"},
        {"pump.waist", "25e-6", "beam waist w_p (m)"},
        {"pump.delta_lambda", "0.5e-9", "bandwidth (m), low gain"},
        {"pump.g", "1", "pump amplitude, high gain"},
        {"pump.delta_t", "3e-14", "temporal width (s), high gain"},
        {"crystal.theta_p_deg", "32.914", "pump angle to the optic axis (deg)"},
        {"crystal.length", "2e-3", "crystal length (m)"},
        {"sellmeier.name", bbo.name, "label of the dispersion set"},
        {"sellmeier.o_a", num(bbo.ordinary.a), "n_o^2 = a + b/(l^2 - c) - d l^2"},
        {"sellmeier.o_b", num(bbo.ordinary.b), ""},
        {"sellmeier.o_c", num(bbo.ordinary.c), ""},
        {"sellmeier.o_d", num(bbo.ordinary.d), ""},
        {"sellmeier.e_a", num(bbo.extraordinary.a), "n_e^2, same form"},
        {"sellmeier.e_b", num(bbo.extraordinary.b), ""},
        {"sellmeier.e_c", num(bbo.extraordinary.c), ""},
        {"sellmeier.e_d", num(bbo.extraordinary.d), ""},
        {"sellmeier.band_min_um", num(bbo.band_min_um), "validity band (um)"},
        {"sellmeier.band_max_um", num(bbo.band_max_um), ""},
        {"truncation.l_max", "auto", "largest OAM index; auto = min(100, (M - 1) / 2)"},
        {"truncation.m_max", "100", "modes kept per l"},
        {"truncation.tol", "1e-8", "relative singular value floor"},
        {"highgain.rho_nodes", "64", "Gauss-Legendre order in rho"},
        {"highgain.t_nodes", "64", "Gauss-Legendre order in t"},
        {"highgain.span", "4", "box half-size in units of w_p and delta_t"},
        {"highgain.tail_tol", "1e-6", "largest accepted envelope mass outside the box"},
        {"sweep.axis", "w_p", "w_p, L, delta_lambda_p, theta_p (deg) or g"},
        {"sweep.values", "", "comma separated values"},
        {"sweep.method", "purity", "purity (purity integral of G) or full (mode decomposition)"},
        {"bench.sizes", "8,12,16", "N for N x N x N bench grids"},
        {"validate.top", "50", "leading weights compared with the oracle"},
        {"validate.spectrum_tol", "1e-8", "largest relative deviation"},
        {"validate.k_tol", "0.01", "largest relative K disagreement"},
    };
  }();
  return keys;
}

inline bool is_config_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (k.name == name) return true;
  return false;
}

/// Resolved key/value text of one run, defaults included.
class ConfigMap {
public:
  ConfigMap() {
    for (const auto& k : config_keys()) values_[k.name] = k.fallback;
  }

  void set(const std::string& name, const std::string& value) {
    if (!is_config_key(name)) throw ConfigError("unknown configuration key '" + name + "'");
    values_[name] = value;
  }
  const std::string& get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + name + "'");
    return it->second;
  }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted "key=value" lines; run.output_dir and run.workers are left out
  /// because they do not change any computed number.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
      if (k == "run.output_dir" || k == "run.workers") continue;
      out += k + "=" + v + "\n";
    }
    return out;
  }

private:
  std::map<std::string, std::string> values_;
};

/// Reads an INI file over the defaults. Unknown sections or keys are errors.
inline void load_ini(const std::string& path, ConfigMap& map) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read configuration '" + path + "': " + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("configuration key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) map.set(section + "." + key, value.get_value<std::string>());
  }
}

inline std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw ConfigError("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("configuration key '" + key + "': '" + text + "' is not a number");
  return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("configuration key '" + key + "': '" + text + "' is not an integer");
  return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const auto v = parse_int(key, text);
  if (v < 1) throw ConfigError("configuration key '" + key + "' must be at least 1");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  const auto t = trim(text);
  if (t.empty()) return out;
  while (start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto piece = t.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_double(key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

} // namespace detail

struct RunConfig {
  ModelConfig model;
  std::string output_dir;
  std::size_t workers = 1;
  SweepAxis sweep_axis = SweepAxis::waist;
  std::vector<double> sweep_values; ///< SI units; theta_p already in radians
  bool sweep_full = false;
  std::vector<std::size_t> bench_sizes;
  std::size_t validate_top = 50;
  double validate_spectrum_tol = 1e-8;
  double validate_k_tol = 0.01;
  std::string hash; ///< SHA-256 of the canonical configuration text
};

inline RunConfig parse_config(const ConfigMap& map) {
  using detail::parse_count;
  using detail::parse_double;
  auto d = [&](const char* k) { return parse_double(k, map.get(k)); };
  auto c = [&](const char* k) { return parse_count(k, map.get(k)); };

  RunConfig rc;
  auto& m = rc.model;
  const auto& regime = map.get("run.regime");
  if (regime == "low-gain") m.regime = Regime::low_gain;
  else if (regime == "high-gain") m.regime = Regime::high_gain;
  else throw ConfigError("run.regime must be low-gain or high-gain, got '" + regime + "'");
  const auto& state = map.get("run.state");
  if (state == "spdc") m.state = StateModel::spdc;
  else if (state == "separable") m.state = StateModel::separable;
  else throw ConfigError("run.state must be spdc or separable, got '" + state + "'");
  rc.output_dir = map.get("run.output_dir");
  rc.workers = c("run.workers");

  m.grid.nq = c("grid.nq");
  m.grid.nw = c("grid.nw");
  m.grid.m = c("grid.m");
  m.grid.q_max = d("grid.q_max");
  m.grid.omega_half_width = d("grid.omega_half_width");

  m.lambda_p0 = d("pump.lambda_p0");
  m.waist = d("pump.waist");
  m.delta_lambda = d("pump.delta_lambda");
  m.g = d("pump.g");
  m.delta_t = d("pump.delta_t");

  m.crystal.theta_p = degrees_to_radians(d("crystal.theta_p_deg"));
  m.crystal.length = d("crystal.length");
  auto& sm = m.crystal.sellmeier;
  sm.name = map.get("sellmeier.name");
  sm.ordinary = {d("sellmeier.o_a"), d("sellmeier.o_b"), d("sellmeier.o_c"), d("sellmeier.o_d")};
  sm.extraordinary = {d("sellmeier.e_a"), d("sellmeier.e_b"), d("sellmeier.e_c"), d("sellmeier.e_d")};
  sm.band_min_um = d("sellmeier.band_min_um");
  sm.band_max_um = d("sellmeier.band_max_um");

  const auto& lmax = map.get("truncation.l_max");
  if (detail::trim(lmax) == "auto")
    m.truncation.l_max = static_cast<int>(std::min<std::size_t>(100, (m.grid.m - 1) / 2));
  else
    m.truncation.l_max = static_cast<int>(detail::parse_int("truncation.l_max", lmax));
  m.truncation.m_max = static_cast<int>(c("truncation.m_max"));
  m.truncation.tol = d("truncation.tol");

  m.highgain.rho_nodes = c("highgain.rho_nodes");
  m.highgain.t_nodes = c("highgain.t_nodes");
  m.highgain.span = d("highgain.span");
  m.highgain.tail_tol = d("highgain.tail_tol");
  m.set_workers(rc.workers);

  rc.sweep_axis = parse_sweep_axis(detail::trim(map.get("sweep.axis")));
  rc.sweep_values = detail::parse_list("sweep.values", map.get("sweep.values"));
  if (rc.sweep_axis == SweepAxis::theta_p)
    for (auto& v : rc.sweep_values) v = degrees_to_radians(v);
  const auto& method = map.get("sweep.method");
  if (method == "purity") rc.sweep_full = false;
  else if (method == "full") rc.sweep_full = true;
  else throw ConfigError("sweep.method must be purity or full, got '" + method + "'");

  for (double v : detail::parse_list("bench.sizes", map.get("bench.sizes"))) {
    if (!(v >= 2.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw ConfigError("bench.sizes must be integers >= 2");
    rc.bench_sizes.push_back(static_cast<std::size_t>(v));
  }
  rc.validate_top = c("validate.top");
  rc.validate_spectrum_tol = d("validate.spectrum_tol");
  rc.validate_k_tol = d("validate.k_tol");

  m.validate();
  rc.hash = sha256_hex(map.canonical());
  return rc;
}

} // namespace stsm
