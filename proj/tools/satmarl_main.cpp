// Command-line front end: train / eval / report / scenarios.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "satmarl/experiment.hpp"
#include "satmarl/scenarios.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Multi-satellite Earth-observation tasking simulator and MARL trainer"};
  app.require_subcommand(1);

  // train
  std::string config_path;
  std::string scenario_name;
  std::string train_output;
  auto* train_cmd = app.add_subcommand("train", "Train an experiment from a config file");
  train_cmd->add_option("config", config_path, "Path to a config file");
  train_cmd->add_option("--scenario", scenario_name, "Train a built-in scenario instead");
  train_cmd->add_option("--output", train_output, "Override the output directory");

  // eval
  std::string run_dir;
  int episodes = 10;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate the checkpoints of a finished run");
  eval_cmd->add_option("run_dir", run_dir, "Run directory with manifest.json")->required();
  eval_cmd->add_option("--episodes", episodes, "Evaluation episodes per seed");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");

  // report
  std::vector<std::string> report_dirs;
  std::string report_out = ".";
  auto* report_cmd = app.add_subcommand("report", "Merge learning curves of finished runs");
  report_cmd->add_option("run_dirs", report_dirs, "Run directories")->required();
  report_cmd->add_option("--output", report_out, "Directory for the report CSVs");

  // scenarios
  std::string emit_name;
  auto* scen_cmd = app.add_subcommand("scenarios", "List the built-in scenario catalog");
  scen_cmd->add_option("--emit", emit_name, "Print the named scenario as a config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return satmarl::kExitConfig;
  }

  if (train_cmd->parsed()) {
    if (!scenario_name.empty()) {
      satmarl::ExperimentConfig exp;
      try {
        exp = satmarl::make_scenario(scenario_name);
        if (!train_output.empty()) exp.output_dir = train_output;
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return satmarl::kExitConfig;
      }
      try {
        return satmarl::run_experiment(exp, satmarl::serialize_experiment(exp), std::cerr);
      } catch (const satmarl::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return satmarl::kExitNumeric;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return satmarl::kExitConfig;
      }
    }
    if (config_path.empty()) {
      std::cerr << "error: train requires a config file or --scenario\n";
      return satmarl::kExitConfig;
    }
    return satmarl::cmd_train(config_path, std::cerr);
  }
  if (eval_cmd->parsed()) {
    return satmarl::cmd_eval(run_dir, episodes, eval_seed, std::cerr);
  }
  if (report_cmd->parsed()) {
    return satmarl::cmd_report(report_dirs, report_out, std::cerr);
  }
  if (scen_cmd->parsed()) {
    if (!emit_name.empty()) {
      try {
        std::cout << satmarl::serialize_experiment(satmarl::make_scenario(emit_name));
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return satmarl::kExitConfig;
      }
      return satmarl::kExitOk;
    }
    return satmarl::cmd_scenarios(std::cout);
  }
  return satmarl::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
