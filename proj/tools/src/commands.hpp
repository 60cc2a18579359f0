#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "meshqos/scenario.hpp"

namespace meshqos::tools {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;  // bad scenario/dataset content
inline constexpr int kExitIoError = 3;       // missing or unwritable files

struct RunOptions {
  std::string scenario;  // built-in name or a file path
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  std::optional<int> packets;            // override every flow
  std::optional<std::int64_t> interval_ms;  // override every flow
  bool jitter = true;
  int runs = 1;  // seeds seed..seed+runs-1, one output directory each
};

struct ReportOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> json_out;  // "-" means stdout
};

// Resolves a --scenario argument: a built-in name first, otherwise a
// path to a scenario file. Throws ScenarioError for unparsable content
// and std::filesystem::filesystem_error (or Error) for unreadable paths.
Scenario load_scenario_arg(const std::string& name_or_path);

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& scenario, std::ostream& out,
                 std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& err);

}  // namespace meshqos::tools
