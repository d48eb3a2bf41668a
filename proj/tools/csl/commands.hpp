#pragma once

// Subcommand implementations.  Each loads its strict-schema config, runs
// the wrapped engines and writes artifacts that embed the fully resolved
// configuration, the seed and the tool version, so any run can be
// re-executed bit-for-bit from its own output.

#include <cstdint>
#include <optional>
#include <string>

namespace cslcli {

// Flag values shared across subcommands.  Optionals mark flags the user
// actually passed; those override the config-file values before the
// resolved config is echoed.
struct CommonArgs {
  std::string input;
  std::string output;  // file path, or output prefix for simulate/medium; empty: stdout
  std::string format;  // "json" or "csv"; empty picks the subcommand default
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> photons;
  std::optional<double> threshold;
  std::optional<double> perception_time;
  std::optional<double> slack;
  bool table = false;  // scenario: emit the full comparison table
};

int cmd_rate(const CommonArgs& args);
int cmd_scenario(const CommonArgs& args);
int cmd_simulate(const CommonArgs& args);
int cmd_medium(const CommonArgs& args);
int cmd_scan(const CommonArgs& args);

}  // namespace cslcli
