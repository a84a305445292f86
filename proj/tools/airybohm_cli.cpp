// Command-line front end: list, validate and run Airy-packet scenarios.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "airybohm/scenario.hpp"

namespace {

using namespace airybohm;

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("AIRYBOHM_OUTPUT_DIR"); env && *env) return env;
  return "airybohm-out";
}

int run_many(const std::vector<std::string>& files, std::filesystem::path out_dir, const RunOptions& options,
             int jobs) {
  std::vector<Scenario> scenarios;
  try {
    for (const auto& f : files) scenarios.push_back(load_scenario(f));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  std::set<std::string> names;
  for (const auto& sc : scenarios) {
    if (!names.insert(sc.name).second) {
      std::cerr << "scenario name '" << sc.name << "' appears more than once in this run\n";
      return kExitConfig;
    }
  }
  const bool nested = scenarios.size() > 1;
  std::vector<int> codes(scenarios.size(), kExitOk);
  std::vector<std::string> logs(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      std::ostringstream log;
      codes[i] = run_scenario(scenarios[i], nested ? out_dir / scenarios[i].name : out_dir, options, log);
      logs[i] = log.str();
    }
  };
  const int n_threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, scenarios.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < n_threads; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  int code = kExitOk;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    (codes[i] == kExitOk ? std::cout : std::cerr) << logs[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories of Airy wave packets in time-dependent quadratic potentials"};
  app.require_subcommand(1);

  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
  std::vector<std::string> run_files;
  std::string validate_file;

  auto* list = app.add_subcommand("list", "List bundled scenarios");
  auto* validate = app.add_subcommand("validate", "Report caustic time and grid advice without running");
  validate->add_option("file", validate_file, "Scenario file or bundled name")->required();
  validate->add_option("--tolerance", tolerance, "Auxiliary ODE tolerance")->check(CLI::PositiveNumber);
  auto* run = app.add_subcommand("run", "Run scenarios and write CSV/SVG artifacts");
  run->add_option("files", run_files, "Scenario files or bundled names")->required();
  run->add_option("-o,--output", out_dir, "Output directory (default: $AIRYBOHM_OUTPUT_DIR or ./airybohm-out)");
  run->add_option("--tolerance", tolerance, "Auxiliary ODE tolerance")->check(CLI::PositiveNumber);
  run->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed for density-weighted initial positions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*list) {
    for (const auto& name : bundled_scenario_names()) std::cout << name << "\n";
    return kExitOk;
  }
  if (*validate) {
    try {
      Scenario sc = load_scenario(validate_file);
      if (tolerance) sc.tolerance = *tolerance;
      std::cout << validate_scenario(sc).text;
      return kExitOk;
    } catch (const ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kExitConfig;
    } catch (const Error& e) {
      std::cerr << "numeric failure: " << e.what() << "\n";
      return kExitNumeric;
    }
  }
  RunOptions options{tolerance, seed};
  return run_many(run_files, out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir), options, jobs);
}
