#include <iostream>

#include <CLI11.hpp>

#include "rmc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Robust MIMO tracking controller: simulation, gain checks and stability diagnostics"};
  app.require_subcommand(1);

  rmc::RunOptions run;
  std::string batch;
  std::string run_out;
  bool no_plot = false;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write the trajectory CSV");
  run_cmd->add_option("config", run.config, "Scenario configuration file");
  run_cmd->add_option("--batch", batch, "Run every *.cfg in a directory concurrently");
  run_cmd->add_option("-o,--output", run_out, "Output CSV (directory with --batch)");
  run_cmd->add_flag("--deg", run.degrees, "Write angle columns in degrees");
  run_cmd->add_flag("--no-plot", no_plot, "Skip the plotting script");

  std::string gains_cfg;
  std::string bounds;
  auto* gains_cmd = app.add_subcommand("check-gains", "Check the gain conditions against bound estimates");
  gains_cmd->add_option("config", gains_cfg, "Scenario configuration file")->required();
  gains_cmd->add_option("--bounds", bounds, "Bounds file ([bounds] section); estimated when omitted");

  std::string matrix;
  auto* dec_cmd = app.add_subcommand("decompose", "SDU decomposition of a square matrix");
  dec_cmd->add_option("matrix", matrix, "Text file, one row per line")->required();

  rmc::AnalyzeOptions an;
  std::string an_out;
  auto* an_cmd = app.add_subcommand("analyze", "Evaluate stability diagnostics on a trajectory CSV");
  an_cmd->add_option("config", an.config, "Scenario configuration file")->required();
  an_cmd->add_option("log", an.log_csv, "Trajectory CSV written by run")->required();
  an_cmd->add_option("-o,--output", an_out, "Diagnostics CSV");
  an_cmd->add_flag("--deg", an.degrees, "Input CSV was written with --deg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rmc::kExitValidation;
  }

  if (*run_cmd) {
    if (batch.empty() && run.config.empty()) {
      std::cerr << "error: run needs a config file or --batch DIR\n";
      return rmc::kExitValidation;
    }
    if (!batch.empty()) {
      run.batch_dir = batch;
    }
    if (!run_out.empty()) {
      run.output = run_out;
    }
    run.plot_script = !no_plot;
    return rmc::cmd_run(run, std::cout, std::cerr);
  }
  if (*gains_cmd) {
    return rmc::cmd_check_gains(gains_cfg, bounds.empty() ? std::nullopt : std::optional<std::filesystem::path>(bounds),
                                std::cout, std::cerr);
  }
  if (*dec_cmd) {
    return rmc::cmd_decompose(matrix, std::cout, std::cerr);
  }
  if (!an_out.empty()) {
    an.output = an_out;
  }
  return rmc::cmd_analyze(an, std::cout, std::cerr);
}
