#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "casimir/log.hpp"
#include "casimir/oracle.hpp"
#include "casimir/tm_channel.hpp"

namespace casimir {

enum class sweep_parameter { mass, separation };
enum class spacing_kind { linear, log };
enum class output_format { csv, json };

struct sweep_spec {
  sweep_parameter parameter = sweep_parameter::mass;
  double start = 0.0;
  double stop = 0.0;
  int points = 1;
  spacing_kind spacing = spacing_kind::linear;
  std::vector<double> explicit_values;  // overrides start/stop/points when non-empty
};

struct labeled_stack {
  std::string label;  // becomes the CSV param_name
  stack_config stack;
};

struct run_config {
  std::vector<labeled_stack> stacks;
  sweep_spec sweep;
  std::vector<channel_id> channels{channel_id::te, channel_id::tm, channel_id::total};
  quadrature_spec quad;
  output_format format = output_format::csv;
  std::string output_path;  // empty writes to stdout
  int parallelism = 1;
};

struct sweep_row {
  std::string param_name;
  double param_value = 0.0;
  channel_id channel = channel_id::total;
  double energy = 0.0;  // J/m^2
  double force = 0.0;   // Pa
  double error_estimate = 0.0;
  long evals = 0;
  bool converged = true;
};

inline std::vector<double> sweep_values(const sweep_spec& sw) {
  if (!sw.explicit_values.empty()) return sw.explicit_values;
  if (sw.points < 1) throw std::invalid_argument("sweep: points must be >= 1");
  if (sw.points == 1) return {sw.start};
  if (!(sw.start <= sw.stop)) throw std::invalid_argument("sweep: start must be <= stop");
  std::vector<double> vals(sw.points);
  if (sw.spacing == spacing_kind::log) {
    if (!(sw.start > 0.0)) throw std::invalid_argument("sweep: log spacing requires start > 0");
    const double ratio = std::log(sw.stop / sw.start) / (sw.points - 1);
    for (int i = 0; i < sw.points; ++i) vals[i] = sw.start * std::exp(ratio * i);
  } else {
    const double step = (sw.stop - sw.start) / (sw.points - 1);
    for (int i = 0; i < sw.points; ++i) vals[i] = sw.start + step * i;
  }
  return vals;
}

inline void validate(const run_config& cfg) {
  if (cfg.stacks.empty()) throw std::invalid_argument("run: no stack configured");
  if (cfg.parallelism < 1) throw std::invalid_argument("run: parallelism must be >= 1");
  if (cfg.channels.empty()) throw std::invalid_argument("run: channels must not be empty");
  for (const auto& [label, stack] : cfg.stacks) {
    for (channel_id ch : cfg.channels) {
      if ((ch == channel_id::tm_i || ch == channel_id::tm_ii) && !tm_split_available(stack))
        throw std::invalid_argument(
            "run: channel " + std::string(channel_name(ch)) + " requested for stack '" + label +
            "' but the polarization split needs conducting plates in a unit-index background or "
            "infinitely permeable plates");
    }
  }
  sweep_values(cfg.sweep);  // validates bounds
}

namespace detail {

inline stack_config at_sweep_point(const stack_config& base, sweep_parameter p, double value) {
  return p == sweep_parameter::mass ? base.with_mass(value) : base.with_separation(value);
}

inline std::pair<energy_result, energy_result> channel_results(const stack_config& s,
                                                               channel_id ch,
                                                               const quadrature_spec& quad) {
  switch (ch) {
    case channel_id::te: return {te_energy(s, quad), te_force(s, quad)};
    case channel_id::tm: return {tm_energy(s, quad), tm_force(s, quad)};
    case channel_id::tm_i:
      return {tm_first_polarization_energy(s, quad), tm_first_polarization_force(s, quad)};
    case channel_id::tm_ii:
      return {tm_second_polarization_energy(s, quad), tm_second_polarization_force(s, quad)};
    default: return {total_energy(s, quad), total_force(s, quad)};
  }
}

}  // namespace detail

/// Evaluates every requested channel at every sweep point of every stack.
/// Points are distributed over `parallelism` workers; rows come back in
/// deterministic (stack, point, channel) order regardless of scheduling.
inline std::vector<sweep_row> run_sweep(const run_config& cfg) {
  validate(cfg);
  const std::vector<double> values = sweep_values(cfg.sweep);
  const std::size_t points = values.size();
  const std::size_t jobs = cfg.stacks.size() * points;
  std::vector<std::vector<sweep_row>> slots(jobs);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> any_failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      const auto& ls = cfg.stacks[i / points];
      const double value = values[i % points];
      const stack_config s = detail::at_sweep_point(ls.stack, cfg.sweep.parameter, value);
      auto& rows = slots[i];
      for (channel_id ch : cfg.channels) {
        sweep_row row;
        row.param_name = ls.label;
        row.param_value = value;
        row.channel = ch;
        try {
          const auto [e, f] = detail::channel_results(s, ch, cfg.quad);
          row.energy = e.value;
          row.force = f.value;
          row.error_estimate = e.error_estimate;
          row.evals = e.evaluations + f.evaluations;
        } catch (const convergence_error& e) {
          row.converged = false;
          row.energy = e.partial_value();
          row.force = std::numeric_limits<double>::quiet_NaN();
          row.error_estimate = e.error_estimate();
          row.evals = e.evaluations();
          any_failed.store(true);
          log::warn(std::string("sweep point did not converge: ") + e.what());
        }
        rows.push_back(std::move(row));
      }
    }
  };

  const int nthreads = std::min<std::size_t>(cfg.parallelism, jobs);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<sweep_row> rows;
  rows.reserve(jobs * cfg.channels.size());
  for (auto& slot : slots)
    for (auto& r : slot) rows.push_back(std::move(r));
  return rows;
}

inline bool all_converged(const std::vector<sweep_row>& rows) {
  for (const auto& r : rows)
    if (!r.converged) return false;
  return true;
}

namespace detail {

// shortest round-trip representation; bit-stable across runs
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& out, const std::vector<sweep_row>& rows) {
  out << "param_name,param_value,channel,energy_J_per_m2,force_Pa,error_estimate,evals\n";
  for (const auto& r : rows) {
    out << r.param_name << ',' << detail::fmt_double(r.param_value) << ',' << channel_name(r.channel)
        << ',' << detail::fmt_double(r.energy) << ',' << detail::fmt_double(r.force) << ','
        << detail::fmt_double(r.error_estimate) << ',' << r.evals << '\n';
  }
}

inline nlohmann::json rows_to_json(const std::vector<sweep_row>& rows) {
  nlohmann::json out;
  out["schema"] = 1;
  auto& arr = out["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"param_name", r.param_name},
                   {"param_value", r.param_value},
                   {"channel", channel_name(r.channel)},
                   {"energy_J_per_m2", r.energy},
                   {"force_Pa", std::isnan(r.force) ? nlohmann::json() : nlohmann::json(r.force)},
                   {"error_estimate", r.error_estimate},
                   {"evals", r.evals},
                   {"converged", r.converged}});
  }
  return out;
}

/// The built-in scenarios: mirror-limit stacks at a = t_l = t_r = 10 nm in
/// backgrounds of constant refractive index 1 and 2, swept over the field
/// mass (dimensionless mc a/hbar from 0 to 20, log-spaced above 0.01).
inline run_config scenario_preset(std::string_view name) {
  const double a = 10e-9;
  auto mass_axis = [&] {
    std::vector<double> mbar{0.0};
    const int n = 24;
    for (int i = 0; i < n; ++i)
      mbar.push_back(1e-2 * std::pow(20.0 / 1e-2, static_cast<double>(i) / (n - 1)));
    std::vector<double> kg;
    kg.reserve(mbar.size());
    for (double m : mbar) kg.push_back(m * hbar / (c_light * a));
    return kg;
  };

  auto stacks_for = [&](const material_model& left, const material_model& right) {
    std::vector<labeled_stack> out;
    out.push_back({"mass(n_b=1)", stack_config(material_model::vacuum(), {left, a}, {right, a}, a, 0.0)});
    out.push_back(
        {"mass(n_b=2)",
         stack_config(material_model::constant_index(2.0), {left, a}, {right, a}, a, 0.0)});
    return out;
  };

  run_config cfg;
  cfg.sweep.parameter = sweep_parameter::mass;
  cfg.sweep.explicit_values = mass_axis();
  // the top of the mass axis is e^{-2 mbar}-suppressed and partially
  // sign-cancelling; it converges, but needs more than the default budget
  cfg.quad.max_evals = 20'000'000;
  if (name == "fig3") {
    cfg.stacks = stacks_for(material_model::perfect_conductor(), material_model::perfect_conductor());
  } else if (name == "fig4") {
    cfg.stacks =
        stacks_for(material_model::infinitely_permeable(), material_model::infinitely_permeable());
  } else if (name == "fig5") {
    cfg.stacks =
        stacks_for(material_model::perfect_conductor(), material_model::infinitely_permeable());
  } else {
    throw std::invalid_argument("unknown scenario '" + std::string(name) +
                                "' (expected fig3, fig4 or fig5)");
  }
  return cfg;
}

}  // namespace casimir
