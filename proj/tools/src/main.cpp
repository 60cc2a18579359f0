#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"BLE mesh simulator with per-class transmission policies"};
  app.require_subcommand(1);

  meshqos::tools::RunOptions run_options;
  bool no_jitter = false;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario");
  run->add_option("--scenario", run_options.scenario,
                  "built-in scenario name or path to a .scn file")
      ->required();
  run->add_option("--seed", run_options.seed, "random seed");
  run->add_option("--out", run_options.out_dir, "output directory");
  run->add_option("--packets", run_options.packets,
                  "override packet count of every flow");
  run->add_option("--interval-ms", run_options.interval_ms,
                  "override origination interval of every flow");
  run->add_flag("--no-jitter", no_jitter,
                "disable the random transmission jitter");
  run->add_option("--runs", run_options.runs,
                  "simulate this many consecutive seeds");

  std::string validate_scenario_arg;
  CLI::App* validate = app.add_subcommand("validate", "check a scenario");
  validate
      ->add_option("--scenario", validate_scenario_arg,
                   "built-in scenario name or path to a .scn file")
      ->required();

  meshqos::tools::ReportOptions report_options;
  std::string json_out;
  CLI::App* report =
      app.add_subcommand("report", "recompute KPIs from a dataset");
  report->add_option("--dataset", report_options.dataset, "dataset.csv path")
      ->required();
  report->add_option("--json", json_out,
                     "write the KPI report as JSON to this path ('-' for "
                     "stdout)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    run_options.jitter = !no_jitter;
    return meshqos::tools::cmd_run(run_options, std::cout, std::cerr);
  }
  if (validate->parsed()) {
    return meshqos::tools::cmd_validate(validate_scenario_arg, std::cout,
                                        std::cerr);
  }
  if (report->parsed()) {
    if (!json_out.empty()) report_options.json_out = json_out;
    return meshqos::tools::cmd_report(report_options, std::cout, std::cerr);
  }
  return 0;
}
