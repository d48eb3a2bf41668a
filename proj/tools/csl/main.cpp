// csl: collapse-rate calculations, perception bounds, medium generators and
// trajectory verification from one reproducible command line.
//
// Exit codes: 0 success, 2 parse or configuration failure, 3 engine failure
// (validation, grid budget, fit).

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config_json.hpp"
#include "csl/errors.hpp"
#include "csl/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mass-proportional collapse model toolkit"};
  app.set_version_flag("--version", csl::version_string);
  app.require_subcommand(1);

  cslcli::CommonArgs args;

  auto add_io = [&args](CLI::App* cmd, bool input_required, const char* output_help) {
    CLI::Option* in = cmd->add_option("--input", args.input, "input config (JSON)");
    if (input_required) in->required();
    cmd->add_option("--output", args.output, output_help);
    return cmd;
  };
  auto add_format = [&args](CLI::App* cmd) {
    cmd->add_option("--format", args.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_criterion = [&args](CLI::App* cmd) {
    cmd->add_option("--photons", args.photons, "override the scenario photon count");
    cmd->add_option("--threshold", args.threshold, "collapse log-suppression threshold");
    cmd->add_option("--perception-time", args.perception_time, "perception window (s)");
    cmd->add_option("--slack", args.slack, "bound slack interval in decades");
  };

  CLI::App* rate = add_io(app.add_subcommand(
                              "rate", "decay rate of a two-branch superposition"),
                          true, "output file (default: stdout)");
  add_format(rate);
  rate->add_option("--workers", args.workers, "threads for the pairwise sum");

  CLI::App* scenario = add_io(app.add_subcommand(
                                  "scenario", "perception rate sum and lambda bound"),
                              true, "output file (default: stdout)");
  add_format(scenario);
  add_criterion(scenario);
  scenario->add_flag("--table", args.table, "emit the full comparison table");

  CLI::App* simulate = add_io(app.add_subcommand(
                                  "simulate", "trajectory-ensemble rate verification"),
                              true, "output prefix for curve.csv and summary.json");
  simulate->add_option("--seed", args.seed, "ensemble master seed");
  simulate->add_option("--workers", args.workers, "trajectory worker threads");

  CLI::App* medium = add_io(app.add_subcommand(
                                "medium", "generate solvated-medium superpositions"),
                            true, "output prefix for _a.txt, _b.txt, _summary.json");
  medium->add_option("--seed", args.seed, "generator seed");
  medium->add_option("--workers", args.workers, "threads for the rate check");

  CLI::App* scan = add_io(app.add_subcommand(
                              "scan", "perceivability verdicts over a parameter grid"),
                          true, "output file (default: stdout)");
  add_format(scan);
  add_criterion(scan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rate->parsed()) return cslcli::cmd_rate(args);
    if (scenario->parsed()) return cslcli::cmd_scenario(args);
    if (simulate->parsed()) return cslcli::cmd_simulate(args);
    if (medium->parsed()) return cslcli::cmd_medium(args);
    if (scan->parsed()) return cslcli::cmd_scan(args);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const cslcli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
