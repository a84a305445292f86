#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "airybohm/aux_odes.hpp"
#include "airybohm/errors.hpp"
#include "airybohm/oracle_pde.hpp"
#include "airybohm/potential.hpp"

namespace airybohm {

/// Scenario file problem, reported with its source line (0 when not tied to a line).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct EnsembleSpec {
  enum class Kind { Default, Linspace, List, DensityWeighted };
  Kind kind = Kind::Default;
  int count = 11;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> values;
};

enum class Artifact { TrajectoriesCsv, DensityHeatmap, VelocityFieldCsv, ComparisonReport, Plot };

std::string to_string(Artifact a);

struct DensityGrid {
  double x_min = -10.0;
  double x_max = 10.0;
  int points = 201;
};

struct Scenario {
  std::string name;
  PhysicalParams params;
  PotentialSpec potential;
  ForcedInitial initial;
  EnsembleSpec ensemble;
  TimeWindow window;
  int time_samples = 101;
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  DensityGrid density_grid;
  OracleConfig oracle;
  std::vector<Artifact> outputs;

  bool wants(Artifact a) const;
  Eigen::ArrayXd time_grid() const;
  std::vector<double> initial_positions() const;
};

Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario parse_scenario_text(const std::string& text, const std::string& source = "<scenario>");

/// Loads a file, or a bundled scenario when the path does not exist and names one.
Scenario load_scenario(const std::string& path_or_name);

std::vector<std::string> bundled_scenario_names();
std::optional<std::string> bundled_scenario_text(const std::string& name);

struct ValidationReport {
  std::optional<double> caustic_time;
  double search_horizon = 0.0;
  bool window_ok = true;
  double recommended_density_dx = 0.0;
  int recommended_oracle_points = 0;
  double estimated_seconds = 0.0;
  std::string text;
};

/// Caustic search and sizing advice without running the pipeline.
ValidationReport validate_scenario(const Scenario& scenario);

struct RunOptions {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the analytic and integrated pipelines and writes the requested
/// artifacts plus report.txt into out_dir. Returns a process exit code.
int run_scenario(Scenario scenario, const std::filesystem::path& out_dir, const RunOptions& options,
                 std::ostream& log);

/// %.17g formatting used by every CSV artifact.
std::string format_number(double v);

}  // namespace airybohm
