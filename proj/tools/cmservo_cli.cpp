#include "cmservo/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t consumed = 0;
    const double v = std::stod(item, &consumed);
    if (consumed != item.size()) {
      throw cmservo::scenario::ValidationError("values", "not a number: " + item);
    }
    values.push_back(v);
  }
  return values;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  cmservo::scenario::ScenarioConfig cfg = cmservo::scenario::load_scenario_file(scenario_path);
  if (seed) cfg.seed = *seed;
  const auto result = cmservo::scenario::run_scenario_to_dir(cfg, out_dir);
  std::cout << cfg.name << ": " << (result.converged ? "converged" : "did not converge")
            << " after " << result.steps << " steps, final error "
            << result.final_error << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::string& values_csv, const std::string& out_dir) {
  const cmservo::scenario::ScenarioConfig base =
      cmservo::scenario::load_scenario_file(scenario_path);
  const auto rows =
      cmservo::scenario::run_sweep(base, param, parse_value_list(values_csv), out_dir);
  for (const auto& row : rows) {
    std::cout << row.parameter << "=" << row.value << ": "
              << (row.failed ? "failed" : (row.converged ? "converged" : "not converged"))
              << " (" << row.steps << " steps)\n";
  }
  return kExitOk;
}

int cmd_list(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw std::ios_base::failure("not a directory: " + dir);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      const auto cfg = cmservo::scenario::load_scenario_file(f);
      const char* kind =
          cfg.objective.type == cmservo::scenario::ObjectiveSpec::Type::kOverlay ? "overlay"
                                                                               : "curvature";
      std::cout << cfg.name << "  [" << kind << "]  " << f << "\n";
    } catch (const std::exception& e) {
      std::cout << "(invalid)  " << f << "  -- " << e.what() << "\n";
    }
  }
  return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
  const auto cfg = cmservo::scenario::load_scenario_file(scenario_path);
  const auto prescan = cmservo::scenario::prescan_objective(cfg);
  std::cout << cmservo::scenario::scenario_to_json(cfg).dump(2) << "\n";
  std::cout << "valid; objective " << (prescan.reachable ? "reachable" : "flagged unreachable")
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-free continuum manipulator control: scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", param, values_csv, dir = "scenarios";
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run one scenario and write its logs");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the scenario seed");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep over one scenario");
  sweep->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--param", param, "beta or j_init_scale")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--out", out_dir, "output directory");

  auto* list = app.add_subcommand("list-scenarios", "list scenario files in a directory");
  list->add_option("--dir", dir, "scenario directory");

  auto* validate = app.add_subcommand("validate", "parse, validate and echo a scenario");
  validate->add_option("--scenario", scenario_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir, seed);
    if (sweep->parsed()) return cmd_sweep(scenario_path, param, values_csv, out_dir);
    if (list->parsed()) return cmd_list(dir);
    if (validate->parsed()) return cmd_validate(scenario_path);
  } catch (const cmservo::scenario::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
