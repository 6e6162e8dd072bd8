#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fracvi/cli.hpp"

namespace {

void add_config_flags(CLI::App* cmd, fracvi::ExperimentConfig& cfg, std::string& config_file) {
  cmd->add_option("--config", config_file, "JSON config file; flags override its fields");
  cmd->add_option("--suite", cfg.suite, "operators|vi|regularity|comparison|extension|all");
  cmd->add_option("--sizes", cfg.sizes, "interior node counts")->delimiter(',');
  cmd->add_option("--s", cfg.s_values, "fractional orders in (0,1]")->delimiter(',');
  cmd->add_option("--seed", cfg.seed, "64-bit seed for all randomness");
  cmd->add_option("--tol-factor", cfg.tol_factor, "multiplier on check tolerances");
  cmd->add_option("--jobs", cfg.jobs, "parallel suite jobs (deterministic merge)");
  cmd->add_option("--out", cfg.output_dir, "output directory");
}

// flags override config-file fields, so the file is folded in first and the
// command line is re-parsed on top of it
int load_config_file(fracvi::ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << path << "'\n";
    return 1;
  }
  nlohmann::json j;
  try {
    in >> j;
    fracvi::config_merge_json(cfg, j);
  } catch (const std::exception& e) {
    std::cerr << "error: bad config file: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral fractional Laplacian obstacle-problem experiment runner"};
  app.require_subcommand(1);

  fracvi::ExperimentConfig run_cfg, describe_cfg;
  std::string run_config_file, describe_config_file;

  CLI::App* cmd_run = app.add_subcommand("run", "execute the selected check suites");
  add_config_flags(cmd_run, run_cfg, run_config_file);
  CLI::App* cmd_describe = app.add_subcommand("describe", "print the resolved plan only");
  add_config_flags(cmd_describe, describe_cfg, describe_config_file);

  try {
    app.parse(argc, argv);
    // second pass so explicit flags win over the config file
    if (cmd_run->parsed() && !run_config_file.empty()) {
      if (int rc = load_config_file(run_cfg, run_config_file)) return rc;
      app.clear();
      app.parse(argc, argv);
    }
    if (cmd_describe->parsed() && !describe_config_file.empty()) {
      if (int rc = load_config_file(describe_cfg, describe_config_file)) return rc;
      app.clear();
      app.parse(argc, argv);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_describe->parsed()) {
      fracvi::describe(describe_cfg, std::cout);
      return 0;
    }
    return fracvi::run(run_cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
