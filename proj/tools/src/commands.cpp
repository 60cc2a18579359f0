#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <vector>

#include "meshqos/errors.hpp"
#include "meshqos/metrics.hpp"
#include "meshqos/simulator.hpp"

namespace meshqos::tools {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::filesystem::filesystem_error(
        "cannot open", path,
        std::make_error_code(std::errc::no_such_file_or_directory));
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::filesystem::filesystem_error(
        "cannot open for writing", path,
        std::make_error_code(std::errc::permission_denied));
  }
  file << text;
  if (!file.flush()) {
    throw std::filesystem::filesystem_error(
        "write failed", path, std::make_error_code(std::errc::io_error));
  }
}

void apply_overrides(Scenario& scenario, const RunOptions& options) {
  for (TrafficFlow& flow : scenario.flows) {
    if (options.packets) flow.packets = *options.packets;
    if (options.interval_ms) flow.interval_ms = *options.interval_ms;
  }
}

// Simulates one seed and writes dataset.csv, kpis.json and the per-class
// delivery time curves into dir. Returns the text KPI table.
std::string run_one(const Scenario& scenario, std::uint64_t seed,
                    const SimOptions& sim_options,
                    const std::filesystem::path& dir) {
  const std::vector<PacketRecord> records =
      run_simulation(scenario, seed, sim_options);

  std::filesystem::create_directories(dir);
  export_dataset(records, dir / "dataset.csv");

  const KpiReport report = compute_kpi_report(records);
  write_file(dir / "kpis.json", kpi_report_json(report));

  for (const auto& [test_id, table] : report) {
    for (const auto& [priority, row] : table) {
      if (row.delivered == 0) continue;
      std::vector<std::int64_t> samples;
      for (const PacketRecord& r : records) {
        if (r.test_id == test_id && r.priority == priority && r.delivered) {
          samples.push_back(r.pdt_ms.value());
        }
      }
      const std::string name = "ecdf_t" + std::to_string(test_id) + "_p" +
                               std::to_string(priority) + ".csv";
      write_file(dir / name, ecdf_to_csv(ecdf(std::move(samples))));
    }
  }
  return kpi_report_text(report);
}

}  // namespace

Scenario load_scenario_arg(const std::string& name_or_path) {
  for (const std::string& name : builtin_scenario_names()) {
    if (name == name_or_path) {
      return load_scenario(builtin_scenario_text(name));
    }
  }
  return load_scenario(read_file(name_or_path));
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = load_scenario_arg(options.scenario);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ScenarioError& e) {
    err << "error: " << options.scenario << ": " << e.what() << "\n";
    return kExitInvalidInput;
  }
  apply_overrides(scenario, options);

  const std::vector<std::string> problems = validate_scenario(scenario);
  if (!problems.empty()) {
    for (const std::string& p : problems) err << "error: " << p << "\n";
    return kExitInvalidInput;
  }
  if (options.runs < 1) {
    err << "error: --runs must be at least 1\n";
    return kExitInvalidInput;
  }

  SimOptions sim_options;
  sim_options.jitter_enabled = options.jitter;

  try {
    if (options.runs == 1) {
      const std::string table =
          run_one(scenario, options.seed, sim_options, options.out_dir);
      out << table;
      out << "outputs written to " << options.out_dir.string() << "\n";
      return kExitOk;
    }

    std::vector<std::future<std::string>> futures;
    futures.reserve(options.runs);
    for (int i = 0; i < options.runs; ++i) {
      const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(i);
      const std::filesystem::path dir =
          options.out_dir / ("seed-" + std::to_string(seed));
      futures.push_back(std::async(std::launch::async, run_one, scenario,
                                   seed, sim_options, dir));
    }
    for (int i = 0; i < options.runs; ++i) {
      const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(i);
      out << "seed " << seed << "\n" << futures[i].get();
    }
    out << "outputs written to " << options.out_dir.string() << "\n";
    return kExitOk;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  }
}

int cmd_validate(const std::string& scenario_arg, std::ostream& out,
                 std::ostream& err) {
  Scenario scenario;
  try {
    scenario = load_scenario_arg(scenario_arg);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ScenarioError& e) {
    err << "error: " << scenario_arg << ": " << e.what() << "\n";
    return kExitInvalidInput;
  }

  const std::vector<std::string> problems = validate_scenario(scenario);
  if (!problems.empty()) {
    for (const std::string& p : problems) err << "error: " << p << "\n";
    return kExitInvalidInput;
  }
  out << "scenario '" << scenario.name << "' is valid: "
      << scenario.nodes.size() << " nodes, " << scenario.flows.size()
      << " flows\n";
  return kExitOk;
}

int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& err) {
  std::string csv;
  try {
    csv = read_file(options.dataset);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoError;
  }

  KpiReport report;
  try {
    report = compute_kpi_report(dataset_from_csv(csv));
  } catch (const Error& e) {
    err << "error: " << options.dataset.string() << ": " << e.what() << "\n";
    return kExitInvalidInput;
  }

  if (options.json_out) {
    const std::string json = kpi_report_json(report);
    if (options.json_out->string() == "-") {
      out << json;
    } else {
      try {
        write_file(*options.json_out, json);
      } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIoError;
      }
    }
  }
  if (!options.json_out || options.json_out->string() != "-") {
    out << kpi_report_text(report);
  }
  return kExitOk;
}

}  // namespace meshqos::tools
