#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "casimir/sweep.hpp"

namespace casimir {

/// Configuration ingestion error; the message carries the offending field path.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void cfg_fail(const std::string& path, const std::string& what) {
  throw config_error("config: " + path + ": " + what);
}

inline const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) cfg_fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) cfg_fail(path + "." + key, "missing required field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) cfg_fail(path, "expected a number");
  return j.get<double>();
}

inline double number_or(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.is_object()) cfg_fail(path, "expected an object");
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, path + "." + key);
}

inline std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) cfg_fail(path, "expected a string");
  return j.get<std::string>();
}

inline material_model parse_material(const json& j, const std::string& path,
                                     const std::filesystem::path& base_dir) {
  const std::string type = string_at(member(j, path, "type"), path + ".type");
  try {
    if (type == "vacuum") return material_model::vacuum();
    if (type == "constant_index")
      return material_model::constant_index(number(member(j, path, "n"), path + ".n"));
    if (type == "constant_eps_mu")
      return material_model::constant_eps_mu(number(member(j, path, "eps"), path + ".eps"),
                                             number(member(j, path, "mu"), path + ".mu"));
    if (type == "plasma")
      return material_model::plasma(
          number(member(j, path, "omega_p_rad_per_s"), path + ".omega_p_rad_per_s"));
    if (type == "tabulated") {
      std::filesystem::path file = string_at(member(j, path, "path"), path + ".path");
      if (file.is_relative()) file = base_dir / file;
      return load_tabulated(file);
    }
    if (type == "perfect_conductor") return material_model::perfect_conductor();
    if (type == "infinitely_permeable") return material_model::infinitely_permeable();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    cfg_fail(path, e.what());
  }
  cfg_fail(path + ".type", "unknown material type '" + type + "'");
}

inline stack_config parse_stack(const json& j, const std::string& path,
                                const std::filesystem::path& base_dir) {
  const auto& left = member(j, path, "plate_left");
  const auto& right = member(j, path, "plate_right");
  auto plate = [&](const json& pj, const std::string& ppath) {
    return plate_config{parse_material(member(pj, ppath, "material"), ppath + ".material", base_dir),
                        number(member(pj, ppath, "thickness_m"), ppath + ".thickness_m")};
  };
  try {
    return stack_config(parse_material(member(j, path, "background"), path + ".background", base_dir),
                        plate(left, path + ".plate_left"), plate(right, path + ".plate_right"),
                        number(member(j, path, "separation_m"), path + ".separation_m"),
                        number_or(j, path, "mass_kg", 0.0));
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    cfg_fail(path, e.what());
  }
}

inline channel_id parse_channel(const std::string& name, const std::string& path) {
  if (name == "TE") return channel_id::te;
  if (name == "TM") return channel_id::tm;
  if (name == "TM_I") return channel_id::tm_i;
  if (name == "TM_II") return channel_id::tm_ii;
  if (name == "total") return channel_id::total;
  cfg_fail(path, "unknown channel '" + name + "' (expected TE, TM, TM_I, TM_II or total)");
}

inline quadrature_spec parse_quadrature(const json& j, const std::string& path) {
  quadrature_spec q;
  q.rel_tol = number_or(j, path, "rel_tol", q.rel_tol);
  q.abs_tol = number_or(j, path, "abs_tol", q.abs_tol);
  q.max_evals = static_cast<long>(number_or(j, path, "max_evals", static_cast<double>(q.max_evals)));
  q.order = static_cast<int>(number_or(j, path, "order", q.order));
  q.level = static_cast<int>(number_or(j, path, "level", q.level));
  if (j.contains("transform")) {
    const std::string t = string_at(j["transform"], path + ".transform");
    if (t == "exp") q.transform = transform_kind::exp_map;
    else if (t == "rational") q.transform = transform_kind::rational_map;
    else cfg_fail(path + ".transform", "expected 'exp' or 'rational'");
  }
  if (j.contains("base_rule")) {
    const std::string r = string_at(j["base_rule"], path + ".base_rule");
    if (r == "gauss_legendre") q.base_rule = base_rule_kind::gauss_legendre;
    else if (r == "tanh_sinh") q.base_rule = base_rule_kind::tanh_sinh;
    else cfg_fail(path + ".base_rule", "expected 'gauss_legendre' or 'tanh_sinh'");
  }
  return q;
}

}  // namespace detail

/// Parses a schema-1 run configuration. SI units in the file; conversion to
/// the internal dimensionless system happens at the stack boundary.
inline run_config parse_run_config(const nlohmann::json& j,
                                   const std::filesystem::path& base_dir = ".") {
  using detail::cfg_fail;
  using detail::member;

  if (!j.is_object()) cfg_fail("$", "expected a JSON object");
  const auto& schema = member(j, "$", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1)
    cfg_fail("schema", "unsupported schema version (expected 1)");

  run_config cfg;
  cfg.stacks.push_back({"", detail::parse_stack(member(j, "$", "stack"), "stack", base_dir)});

  if (j.contains("sweep")) {
    const auto& sj = j["sweep"];
    const std::string param = detail::string_at(member(sj, "sweep", "parameter"), "sweep.parameter");
    if (param == "mass") cfg.sweep.parameter = sweep_parameter::mass;
    else if (param == "separation") cfg.sweep.parameter = sweep_parameter::separation;
    else cfg_fail("sweep.parameter", "expected 'mass' or 'separation'");
    cfg.sweep.start = detail::number(member(sj, "sweep", "start"), "sweep.start");
    cfg.sweep.stop = detail::number(member(sj, "sweep", "stop"), "sweep.stop");
    cfg.sweep.points = static_cast<int>(detail::number(member(sj, "sweep", "points"), "sweep.points"));
    if (sj.contains("spacing")) {
      const std::string sp = detail::string_at(sj["spacing"], "sweep.spacing");
      if (sp == "linear") cfg.sweep.spacing = spacing_kind::linear;
      else if (sp == "log") cfg.sweep.spacing = spacing_kind::log;
      else cfg_fail("sweep.spacing", "expected 'linear' or 'log'");
    }
  } else {
    // no sweep: evaluate the stack as configured, one point
    cfg.sweep.parameter = sweep_parameter::mass;
    cfg.sweep.explicit_values = {cfg.stacks.front().stack.mass()};
  }
  cfg.stacks.front().label =
      cfg.sweep.parameter == sweep_parameter::mass ? "mass" : "separation";

  if (j.contains("channels")) {
    if (!j["channels"].is_array()) cfg_fail("channels", "expected an array");
    cfg.channels.clear();
    std::size_t i = 0;
    for (const auto& cj : j["channels"]) {
      const std::string cpath = "channels[" + std::to_string(i++) + "]";
      cfg.channels.push_back(detail::parse_channel(detail::string_at(cj, cpath), cpath));
    }
  }

  if (j.contains("quadrature")) cfg.quad = detail::parse_quadrature(j["quadrature"], "quadrature");

  if (j.contains("output")) {
    const auto& oj = j["output"];
    if (oj.contains("format")) {
      const std::string f = detail::string_at(oj["format"], "output.format");
      if (f == "csv") cfg.format = output_format::csv;
      else if (f == "json") cfg.format = output_format::json;
      else cfg_fail("output.format", "expected 'csv' or 'json'");
    }
    if (oj.contains("path")) cfg.output_path = detail::string_at(oj["path"], "output.path");
  }

  if (j.contains("parallelism")) {
    if (!j["parallelism"].is_number_integer() || j["parallelism"].get<int>() < 1)
      cfg_fail("parallelism", "expected an integer >= 1");
    cfg.parallelism = j["parallelism"].get<int>();
  }

  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  return cfg;
}

inline run_config load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config: " + path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

}  // namespace casimir
