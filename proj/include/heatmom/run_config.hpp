#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "heatmom/heat_models.hpp"
#include "heatmom/moment_index.hpp"
#include "heatmom/sdp_solver.hpp"

namespace heatmom {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Example:
// {
//   "model": {"variant": "distributed", "epsilon": 1e-3, "m1": 1, "m2": 1},
//   "initial_data": [[-1, 1, 0], [0, 1, 0], [1, 1, 0]],
//   "degrees": [4, 2, 2],
//   "solver": {"max_iters": 50000, "abs_tol": 1e-7},
//   "output_dir": "out"
// }
struct RunConfig {
  HeatModel model = LinearHeat{};
  InitialData initial = InitialData::unit_low_modes();
  TruncationDegrees degrees{4, 2, 2};
  SolverSettings solver;
  std::string output_dir = ".";
};

namespace detail {

template <class T>
T config_get(const nlohmann::json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

inline void config_check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                              const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key " + where + "." + it.key());
  }
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::config_get;
  RunConfig cfg;
  detail::config_check_keys(j, {"model", "initial_data", "degrees", "solver", "output_dir"}, "config");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    detail::config_check_keys(m, {"variant", "epsilon", "m1", "m2"}, "model");
    const auto variant = config_get<std::string>(m, "variant", "linear", "model");
    const double eps = config_get<double>(m, "epsilon", 0.0, "model");
    if (!std::isfinite(eps)) throw ConfigError("model.epsilon must be finite");
    if (variant == "linear") {
      if (eps != 0.0) throw ConfigError("model.epsilon must be 0 for the linear model");
      cfg.model = LinearHeat{};
    } else if (variant == "distributed") {
      cfg.model = DistributedQuadratic{eps, config_get<int>(m, "m1", 1, "model"), config_get<int>(m, "m2", 1, "model")};
    } else if (variant == "local") {
      cfg.model = LocalQuadratic{eps};
    } else {
      throw ConfigError("model.variant must be linear, distributed or local, got '" + variant + "'");
    }
  }

  if (j.contains("initial_data")) {
    const auto& arr = j.at("initial_data");
    if (!arr.is_array() || arr.empty()) throw ConfigError("initial_data must be a nonempty list of [n, re, im]");
    cfg.initial.coeffs.clear();
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number() || !e[2].is_number())
        throw ConfigError("initial_data entries must be [n, re, im] with integer n");
      const int n = e[0].get<int>();
      if (cfg.initial.coeffs.count(n)) throw ConfigError("initial_data repeats mode " + std::to_string(n));
      cfg.initial.coeffs[n] = Complex{e[1].get<double>(), e[2].get<double>()};
    }
    if (!cfg.initial.is_real_valued())
      throw ConfigError("initial_data must describe a real function: u_{-n} = conj(u_n)");
  }

  if (j.contains("degrees")) {
    const auto& d = j.at("degrees");
    if (!d.is_array() || d.size() != 3) throw ConfigError("degrees must be [d_t, d_a, d_h]");
    for (const auto& v : d)
      if (!v.is_number_integer()) throw ConfigError("degrees must be integers");
    cfg.degrees = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    detail::config_check_keys(s,
                              {"max_iters", "abs_tol", "rel_tol", "penalty", "scaling", "relaxation",
                               "adaptive_penalty", "polish"},
                              "solver");
    auto& o = cfg.solver;
    o.max_iters = config_get(s, "max_iters", o.max_iters, "solver");
    o.abs_tol = config_get(s, "abs_tol", o.abs_tol, "solver");
    o.rel_tol = config_get(s, "rel_tol", o.rel_tol, "solver");
    o.penalty = config_get(s, "penalty", o.penalty, "solver");
    o.scaling = config_get(s, "scaling", o.scaling, "solver");
    o.relaxation = config_get(s, "relaxation", o.relaxation, "solver");
    o.adaptive_penalty = config_get(s, "adaptive_penalty", o.adaptive_penalty, "solver");
    o.polish = config_get(s, "polish", o.polish, "solver");
    if (!(o.abs_tol > 0.0) || !(o.rel_tol > 0.0)) throw ConfigError("solver tolerances must be positive");
    if (!(o.penalty > 0.0)) throw ConfigError("solver.penalty must be positive");
    if (!(o.relaxation > 0.0 && o.relaxation < 2.0)) throw ConfigError("solver.relaxation must lie in (0, 2)");
    if (o.max_iters < 1) throw ConfigError("solver.max_iters must be positive");
  }

  cfg.output_dir = config_get<std::string>(j, "output_dir", cfg.output_dir, "config");

  try {
    require_solvable(cfg.degrees);
    validate_model(cfg.model, cfg.degrees);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace heatmom
