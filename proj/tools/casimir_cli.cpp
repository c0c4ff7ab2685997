#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "casimir/casimir.hpp"

namespace {

int write_rows(const casimir::run_config& cfg, const std::vector<casimir::sweep_row>& rows) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.output_path.empty()) {
    file.open(cfg.output_path, std::ios::binary);
    if (!file) {
      std::cerr << "casimir: cannot open output path " << cfg.output_path << "\n";
      return 1;
    }
    out = &file;
  }
  if (cfg.format == casimir::output_format::csv) {
    casimir::write_csv(*out, rows);
  } else {
    *out << casimir::rows_to_json(rows).dump(2) << "\n";
  }
  return casimir::all_converged(rows) ? 0 : 2;
}

std::optional<casimir::q_perturbation> parse_mutation(const std::string& arg) {
  casimir::q_perturbation p;
  if (std::sscanf(arg.c_str(), "%d,%d,%lf", &p.row, &p.col, &p.factor) != 3 || p.row < 0 ||
      p.row > 3 || p.col < 0 || p.col > 3)
    return std::nullopt;
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir energy and force of a massive vector field between "
               "magnetodielectric plates"};
  app.require_subcommand(1);

  std::string config_path, scenario, output_path, format;
  int parallelism = 0;
  auto* run = app.add_subcommand("run", "evaluate a sweep from a config file or scenario preset");
  run->add_option("--config", config_path, "JSON run configuration (schema 1)");
  run->add_option("--scenario", scenario, "built-in preset: fig3, fig4 or fig5");
  run->add_option("--output", output_path, "output path (default: stdout)");
  run->add_option("--format", format, "csv or json (overrides the config)");
  run->add_option("--parallelism", parallelism, "worker count (overrides the config)");

  std::string level = "quick", verify_json, mutate;
  auto* verify = app.add_subcommand("verify", "run the built-in oracle suite");
  verify->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--json", verify_json, "also write the report as JSON to this path");
  verify->add_option("--mutate-q", mutate, "row,col,factor entry perturbation (test hook)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_path.empty() == scenario.empty()) {
        std::cerr << "casimir run: give exactly one of --config or --scenario\n";
        return 1;
      }
      casimir::run_config cfg = config_path.empty() ? casimir::scenario_preset(scenario)
                                                    : casimir::load_run_config(config_path);
      if (!output_path.empty()) cfg.output_path = output_path;
      if (!format.empty()) {
        if (format == "csv") cfg.format = casimir::output_format::csv;
        else if (format == "json") cfg.format = casimir::output_format::json;
        else {
          std::cerr << "casimir run: --format must be csv or json\n";
          return 1;
        }
      }
      if (parallelism > 0) cfg.parallelism = parallelism;
      casimir::log::info("running sweep with " + std::to_string(cfg.stacks.size()) + " stack(s)");
      const auto rows = casimir::run_sweep(cfg);
      return write_rows(cfg, rows);
    }

    // verify
    std::optional<casimir::q_perturbation> perturb;
    if (!mutate.empty()) {
      perturb = parse_mutation(mutate);
      if (!perturb) {
        std::cerr << "casimir verify: --mutate-q expects row,col,factor with indices 0..3\n";
        return 1;
      }
    }
    const auto report = casimir::run_verification(
        level == "full" ? casimir::verify_level::full : casimir::verify_level::quick,
        perturb ? &*perturb : nullptr);
    std::cout << casimir::to_text(report);
    if (!verify_json.empty()) {
      std::ofstream jf(verify_json, std::ios::binary);
      if (!jf) {
        std::cerr << "casimir verify: cannot open " << verify_json << "\n";
        return 1;
      }
      jf << casimir::to_json(report).dump(2) << "\n";
    }
    return report.all_passed ? 0 : 1;
  } catch (const casimir::config_error& e) {
    std::cerr << "casimir: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "casimir: error: " << e.what() << "\n";
    return 2;
  }
}
