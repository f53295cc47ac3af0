// pdhg_lab: run, sweep, verify and inspect PDHG experiments from a JSON config.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdhg/experiment.hpp"

namespace {

void print_checks(const pdhg::ExperimentResult& r) {
  for (const auto& c : r.checks) {
    std::cout << to_string(c.check) << ": " << to_string(c.status) << "  " << c.detail << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for primal-dual hybrid gradient step-size regimes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;

  auto* run_cmd = app.add_subcommand("run", "run one experiment, write <output>.csv and <output>_summary.json");
  run_cmd->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output", output, "override the output prefix");

  auto* sweep_cmd = app.add_subcommand("sweep", "run every cell of the config's sweep grid");
  sweep_cmd->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--output", output, "override the output prefix");

  auto* verify_cmd = app.add_subcommand("verify", "run the checks only and print the summary");
  verify_cmd->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  auto* info_cmd = app.add_subcommand("info", "print resolved defaults, margins, K0, alpha, rho");
  info_cmd->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; usage errors share exit 2 with bad configs.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    pdhg::ExperimentConfig config = pdhg::load_config(config_path);
    if (!output.empty()) config.output = output;

    if (app.got_subcommand(info_cmd)) {
      std::cout << pdhg::describe(config);
      return 0;
    }
    if (app.got_subcommand(verify_cmd)) {
      const auto r = pdhg::execute(config, {false, false});
      std::cout << r.summary;
      return r.exit_code();
    }
    if (app.got_subcommand(sweep_cmd)) {
      const auto s = pdhg::sweep(config, pdhg::sweep_jobs_from_env());
      for (size_t i = 0; i < s.cells.size(); ++i) {
        std::cout << "cell " << s.cells[i].index << " (" << s.cells[i].config.output << ")\n";
        print_checks(s.results[i]);
      }
      std::cout << "aggregate: " << config.output << "_sweep.csv\n";
      return s.exit_code;
    }
    const auto r = pdhg::execute(config);
    print_checks(r);
    std::cout << "wrote " << config.output << ".csv and " << config.output << "_summary.json\n";
    return r.exit_code();
  } catch (const pdhg::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
