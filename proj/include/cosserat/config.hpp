// config.hpp
//
// Line-oriented `key = value` run configuration with `#` comments. Unknown
// keys are rejected; every violation names the offending line.

#ifndef COSSERAT_CONFIG_HPP
#define COSSERAT_CONFIG_HPP

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/core.hpp"

namespace cosserat {

struct ConfigError : std::runtime_error {
  enum class Kind { UnknownKey, TypeError, InvariantViolation };
  ConfigError(Kind k, int line, const std::string& msg)
      : std::runtime_error((k == Kind::UnknownKey      ? "unknown key"
                            : k == Kind::TypeError     ? "type error"
                                                       : "invariant violation") +
                           std::string(" (line ") + std::to_string(line) + "): " + msg),
        kind(k), line(line) {}
  Kind kind;
  int line;
};

// Error measure of the refinement studies: the full state vector, or the
// smooth position/angle observables only (the components that stay clean
// when the conserving time integration keeps unresolved wave content alive).
enum class ErrorMetric { State, Position };

// Run configuration with the cantilever defaults: (Fr, mu, a) = (1, 10, 2.5),
// grid dt = ds = 1e-2, lambda = 1, end time T = 2.5, variant S, limit system.
struct RunConfig {
  Parameters params;  // epsilon = 0, mu = 10, a = 2.5, froude = 1, gravity on
  GridSpec grid;      // n_cells = 100, dt = 1e-2, lambda = 1
  Variant variant = Variant::S;
  SystemKind kind = SystemKind::Limit;
  double t_end = 2.5;
  ErrorMetric error_metric = ErrorMetric::State;
  std::string out;

  // epsilon sweep: explicit list, or log-spaced window
  std::vector<double> eps_list;
  double eps_min = 1e-10;
  double eps_max = 1.0;
  int eps_count = 21;

  // refinement studies: steps {refine_base * 0.5^k, k = 0..refine_count-1}
  double refine_base = 1e-1;
  int refine_count = 8;
  double ref_ds = 1e-3;
  double ref_dt = 1e-3;

  std::vector<double> epsilon_grid() const {
    if (!eps_list.empty()) return eps_list;
    std::vector<double> out_list;
    out_list.reserve(eps_count);
    const double l0 = std::log10(eps_min), l1 = std::log10(eps_max);
    for (int i = 0; i < eps_count; ++i) {
      const double t = eps_count == 1 ? 0.0 : static_cast<double>(i) / (eps_count - 1);
      out_list.push_back(std::pow(10.0, l0 + t * (l1 - l0)));
    }
    return out_list;
  }

  std::vector<double> refinement_steps() const {
    std::vector<double> steps;
    double h = refine_base;
    for (int k = 0; k < refine_count; ++k, h *= 0.5) steps.push_back(h);
    return steps;
  }
};

namespace detail_config {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(ConfigError::Kind::TypeError, line, "expected a number, got `" + v + "`");
  }
}

inline int parse_int(const std::string& v, int line) {
  const double x = parse_number(v, line);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 1e-12)
    throw ConfigError(ConfigError::Kind::TypeError, line, "expected an integer, got `" + v + "`");
  return i;
}

inline bool parse_on_off(const std::string& v, int line) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(ConfigError::Kind::TypeError, line, "expected on/off, got `" + v + "`");
}

inline std::vector<double> parse_list(const std::string& v, int line) {
  std::vector<double> values;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) values.push_back(parse_number(item, line));
  }
  if (values.empty())
    throw ConfigError(ConfigError::Kind::TypeError, line, "expected a comma-separated list");
  return values;
}

}  // namespace detail_config

inline Variant parse_variant(const std::string& v, int line = 0) {
  if (v == "M" || v == "m") return Variant::M;
  if (v == "T" || v == "t") return Variant::T;
  if (v == "S" || v == "s") return Variant::S;
  throw ConfigError(ConfigError::Kind::TypeError, line, "variant must be M, T or S, got `" + v + "`");
}

inline SystemKind parse_kind(const std::string& v, int line = 0) {
  if (v == "eps") return SystemKind::EpsDependent;
  if (v == "limit") return SystemKind::Limit;
  if (v == "correction") return SystemKind::Correction;
  throw ConfigError(ConfigError::Kind::TypeError, line,
                    "kind must be eps, limit or correction, got `" + v + "`");
}

inline RunConfig parse_config(const std::string& text) {
  using detail_config::parse_int;
  using detail_config::parse_list;
  using detail_config::parse_number;
  using detail_config::parse_on_off;
  using detail_config::trim;
  using Kind = ConfigError::Kind;

  RunConfig cfg;
  std::optional<double> nu_value, a_value, ds_value;
  std::optional<int> n_cells_value;
  int nu_line = 0, a_line = 0, ds_line = 0, n_cells_line = 0;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(Kind::TypeError, line, "expected `key = value`");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(Kind::TypeError, line, "expected `key = value`");

    if (key == "epsilon") {
      cfg.params.epsilon = parse_number(value, line);
      if (!(cfg.params.epsilon >= 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "epsilon must be >= 0");
    } else if (key == "mu") {
      cfg.params.mu = parse_number(value, line);
      if (!(cfg.params.mu > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "mu must be > 0");
    } else if (key == "a") {
      a_value = parse_number(value, line);
      a_line = line;
    } else if (key == "nu") {
      nu_value = parse_number(value, line);
      nu_line = line;
    } else if (key == "froude") {
      cfg.params.froude = parse_number(value, line);
      if (!(cfg.params.froude > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "froude must be > 0");
    } else if (key == "gravity") {
      cfg.params.gravity = parse_on_off(value, line);
    } else if (key == "n_cells") {
      n_cells_value = parse_int(value, line);
      n_cells_line = line;
    } else if (key == "ds") {
      ds_value = parse_number(value, line);
      ds_line = line;
    } else if (key == "dt") {
      cfg.grid.dt = parse_number(value, line);
      if (!(cfg.grid.dt > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "dt must be > 0");
    } else if (key == "lambda") {
      cfg.grid.lambda = parse_number(value, line);
      if (!(cfg.grid.lambda >= 0.5 && cfg.grid.lambda <= 1.0))
        throw ConfigError(Kind::InvariantViolation, line, "lambda must lie in [0.5, 1]");
    } else if (key == "t_end") {
      cfg.t_end = parse_number(value, line);
      if (!(cfg.t_end >= 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "t_end must be >= 0");
    } else if (key == "variant") {
      cfg.variant = parse_variant(value, line);
    } else if (key == "kind") {
      cfg.kind = parse_kind(value, line);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "eps_list") {
      cfg.eps_list = parse_list(value, line);
      for (double e : cfg.eps_list)
        if (!(e > 0.0))
          throw ConfigError(Kind::InvariantViolation, line, "eps_list entries must be > 0");
    } else if (key == "eps_min") {
      cfg.eps_min = parse_number(value, line);
      if (!(cfg.eps_min > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "eps_min must be > 0");
    } else if (key == "eps_max") {
      cfg.eps_max = parse_number(value, line);
      if (!(cfg.eps_max > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "eps_max must be > 0");
    } else if (key == "eps_count") {
      cfg.eps_count = parse_int(value, line);
      if (cfg.eps_count < 1)
        throw ConfigError(Kind::InvariantViolation, line, "eps_count must be >= 1");
    } else if (key == "refine_base") {
      cfg.refine_base = parse_number(value, line);
      if (!(cfg.refine_base > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "refine_base must be > 0");
    } else if (key == "refine_count") {
      cfg.refine_count = parse_int(value, line);
      if (cfg.refine_count < 1)
        throw ConfigError(Kind::InvariantViolation, line, "refine_count must be >= 1");
    } else if (key == "ref_ds") {
      cfg.ref_ds = parse_number(value, line);
      if (!(cfg.ref_ds > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "ref_ds must be > 0");
    } else if (key == "ref_dt") {
      cfg.ref_dt = parse_number(value, line);
      if (!(cfg.ref_dt > 0.0))
        throw ConfigError(Kind::InvariantViolation, line, "ref_dt must be > 0");
    } else if (key == "error_metric") {
      if (value == "state")
        cfg.error_metric = ErrorMetric::State;
      else if (value == "position")
        cfg.error_metric = ErrorMetric::Position;
      else
        throw ConfigError(Kind::TypeError, line,
                          "error_metric must be state or position, got `" + value + "`");
    } else {
      throw ConfigError(Kind::UnknownKey, line, "`" + key + "`");
    }
  }

  if (nu_value && a_value)
    throw ConfigError(Kind::InvariantViolation, std::max(nu_line, a_line),
                      "specify either a or nu, not both");
  if (nu_value) {
    if (!(*nu_value >= 0.0 && *nu_value < 0.5))
      throw ConfigError(Kind::InvariantViolation, nu_line, "nu must lie in [0, 0.5)");
    cfg.params.a = Parameters::shear_ratio_from_nu(*nu_value);
  } else if (a_value) {
    cfg.params.a = *a_value;
    if (!(cfg.params.a >= 2.0 && cfg.params.a < 3.0))
      throw ConfigError(Kind::InvariantViolation, a_line, "a must lie in [2, 3)");
  }

  if (ds_value && n_cells_value)
    throw ConfigError(Kind::InvariantViolation, std::max(ds_line, n_cells_line),
                      "specify either ds or n_cells, not both");
  if (ds_value) {
    const double n_exact = 1.0 / *ds_value;
    const int n = static_cast<int>(std::llround(n_exact));
    if (n < 2 || std::abs(n * *ds_value - 1.0) > 1e-9)
      throw ConfigError(Kind::InvariantViolation, ds_line, "ds must divide the unit interval");
    cfg.grid.n_cells = n;
  } else if (n_cells_value) {
    if (*n_cells_value < 2)
      throw ConfigError(Kind::InvariantViolation, n_cells_line, "n_cells must be >= 2");
    cfg.grid.n_cells = *n_cells_value;
  }

  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cosserat

#endif  // COSSERAT_CONFIG_HPP
