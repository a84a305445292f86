#include "airybohm/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "airybohm/trajectories.hpp"
#include "airybohm/wavefunction.hpp"

namespace airybohm {

namespace detail {
// Generated from scenarios/*.scenario at configure time.
extern const std::vector<std::pair<std::string, std::string>> kBundledScenarios;
}  // namespace detail

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

std::string to_string(Artifact a) {
  switch (a) {
    case Artifact::TrajectoriesCsv: return "trajectories_csv";
    case Artifact::DensityHeatmap: return "density_heatmap";
    case Artifact::VelocityFieldCsv: return "velocity_field_csv";
    case Artifact::ComparisonReport: return "comparison_report";
    case Artifact::Plot: return "plot";
  }
  return "unknown";
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool Scenario::wants(Artifact a) const { return std::find(outputs.begin(), outputs.end(), a) != outputs.end(); }

Eigen::ArrayXd Scenario::time_grid() const { return Eigen::ArrayXd::LinSpaced(time_samples, 0.0, window.end); }

std::vector<double> Scenario::initial_positions() const {
  switch (ensemble.kind) {
    case EnsembleSpec::Kind::Default:
      return default_initial_positions(params, initial.X0, ensemble.count);
    case EnsembleSpec::Kind::Linspace: {
      std::vector<double> out;
      for (int i = 0; i < ensemble.count; ++i)
        out.push_back(ensemble.count == 1 ? ensemble.lo
                                          : ensemble.lo + (ensemble.hi - ensemble.lo) * i / (ensemble.count - 1));
      return out;
    }
    case EnsembleSpec::Kind::List:
      return ensemble.values;
    case EnsembleSpec::Kind::DensityWeighted:
      return density_weighted_positions(params, initial.X0, ensemble.count, ensemble.lo, ensemble.hi, seed);
  }
  return {};
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"", {"name"}},
      {"params", {"hbar", "m", "B"}},
      {"potential", {"omega_sq", "force"}},
      {"initial", {"X0", "X_dot0"}},
      {"ensemble", {"positions", "seed"}},
      {"window", {"t_end", "samples"}},
      {"solver", {"tolerance"}},
      {"density", {"x_min", "x_max", "points"}},
      {"oracle", {"apodization", "x_min", "x_max", "n_points", "dt", "t_max", "lobe", "frame_stride"}},
      {"output", {"artifacts"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Section> sections)
      : source_(std::move(source)), sections_(std::move(sections)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const { throw ConfigError(source_, line, msg); }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  int section_line(const std::string& s) const { return has_section(s) ? sections_.at(s).line : 0; }

  const Entry* find(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    auto e = it->second.entries.find(key);
    return e == it->second.entries.end() ? nullptr : &e->second;
  }

  double number(const std::string& word, int line) const {
    double v = 0;
    const char* first = word.data();
    const char* last = first + word.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(line, "expected a number, got '" + word + "'");
    return v;
  }

  int integer(const std::string& word, int line) const {
    const double v = number(word, line);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(line, "expected an integer, got '" + word + "'");
    return static_cast<int>(v);
  }

  double get_number(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const auto words = split_words(e->value);
    if (words.size() != 1) fail(e->line, key + " expects a single number");
    return number(words[0], e->line);
  }

  int get_integer(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const auto words = split_words(e->value);
    if (words.size() != 1) fail(e->line, key + " expects a single integer");
    return integer(words[0], e->line);
  }

  int line_of(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return e ? e->line : section_line(section);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

TabulatedTerm parse_tabulated(const Reader& r, const std::vector<std::string>& words, int line) {
  TabulatedTerm tab;
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto colon = words[i].find(':');
    if (colon == std::string::npos) r.fail(line, "tabulated samples are written as t:value, got '" + words[i] + "'");
    tab.t.push_back(r.number(words[i].substr(0, colon), line));
    tab.value.push_back(r.number(words[i].substr(colon + 1), line));
  }
  if (tab.t.empty()) r.fail(line, "tabulated term needs at least one t:value sample");
  return tab;
}

OmegaSqTerm parse_omega_sq(const Reader& r, const Entry& e) {
  const auto w = split_words(e.value);
  if (w.empty()) r.fail(e.line, "omega_sq is empty");
  if (w[0] == "zero" && w.size() == 1) return ZeroTerm{};
  if (w[0] == "constant" && w.size() == 2) return ConstantTerm{r.number(w[1], e.line)};
  if (w[0] == "mathieu" && (w.size() == 3 || w.size() == 4)) {
    MathieuTerm m{r.number(w[1], e.line), r.number(w[2], e.line), w.size() == 4 ? r.number(w[3], e.line) : 1.0};
    if (!(m.scale > 0)) r.fail(e.line, "mathieu scale must be positive");
    return m;
  }
  if (w[0] == "tabulated") return parse_tabulated(r, w, e.line);
  r.fail(e.line, "omega_sq must be 'zero', 'constant <w2>', 'mathieu <a> <q> [scale]' or 'tabulated t:v ...'");
}

ForceTerm parse_force(const Reader& r, const Entry& e) {
  const auto w = split_words(e.value);
  if (w.empty()) r.fail(e.line, "force is empty");
  if (w[0] == "zero" && w.size() == 1) return ZeroTerm{};
  if (w[0] == "constant" && w.size() == 2) return ConstantTerm{r.number(w[1], e.line)};
  if (w[0] == "tabulated") return parse_tabulated(r, w, e.line);
  r.fail(e.line, "force must be 'zero', 'constant <F0>' or 'tabulated t:v ...'");
}

EnsembleSpec parse_ensemble(const Reader& r, const Entry& e) {
  const auto w = split_words(e.value);
  EnsembleSpec spec;
  auto count = [&](const std::string& word) {
    const int n = r.integer(word, e.line);
    if (n < 0) r.fail(e.line, "particle count must be non-negative");
    return n;
  };
  if (!w.empty() && w[0] == "default" && w.size() <= 2) {
    spec.kind = EnsembleSpec::Kind::Default;
    spec.count = w.size() == 2 ? count(w[1]) : 11;
  } else if (!w.empty() && w[0] == "linspace" && w.size() == 4) {
    spec.kind = EnsembleSpec::Kind::Linspace;
    spec.lo = r.number(w[1], e.line);
    spec.hi = r.number(w[2], e.line);
    spec.count = count(w[3]);
  } else if (!w.empty() && w[0] == "list") {
    spec.kind = EnsembleSpec::Kind::List;
    for (std::size_t i = 1; i < w.size(); ++i) spec.values.push_back(r.number(w[i], e.line));
    spec.count = static_cast<int>(spec.values.size());
  } else if (!w.empty() && w[0] == "density" && w.size() == 4) {
    spec.kind = EnsembleSpec::Kind::DensityWeighted;
    spec.count = count(w[1]);
    spec.lo = r.number(w[2], e.line);
    spec.hi = r.number(w[3], e.line);
    if (!(spec.hi > spec.lo)) r.fail(e.line, "density sampling window must satisfy lo < hi");
  } else {
    r.fail(e.line,
           "positions must be 'default [n]', 'linspace <lo> <hi> <n>', 'list <x>...' or 'density <n> <lo> <hi>'");
  }
  return spec;
}

std::vector<Artifact> parse_artifacts(const Reader& r, const Entry& e) {
  static const std::map<std::string, Artifact> names = {
      {"trajectories_csv", Artifact::TrajectoriesCsv}, {"density_heatmap", Artifact::DensityHeatmap},
      {"velocity_field_csv", Artifact::VelocityFieldCsv}, {"comparison_report", Artifact::ComparisonReport},
      {"plot", Artifact::Plot}};
  std::vector<Artifact> out;
  for (const auto& w : split_words(e.value)) {
    auto it = names.find(w);
    if (it == names.end()) r.fail(e.line, "unknown artifact '" + w + "'");
    if (std::find(out.begin(), out.end(), it->second) == out.end()) out.push_back(it->second);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  std::map<std::string, Section> sections;
  sections[""].line = 1;
  std::string current;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!schema().count(current) || current.empty())
        throw ConfigError(source, line_no, "unknown section [" + current + "]");
      if (sections.count(current)) throw ConfigError(source, line_no, "duplicate section [" + current + "]");
      sections[current].line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!schema().at(current).count(key)) {
      throw ConfigError(source, line_no,
                        "unknown key '" + key + "'" + (current.empty() ? "" : " in [" + current + "]"));
    }
    auto& entries = sections[current].entries;
    if (entries.count(key)) throw ConfigError(source, line_no, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(source, line_no, "key '" + key + "' has no value");
    entries[key] = Entry{value, line_no};
  }

  const Reader r(source, std::move(sections));
  Scenario sc;

  const Entry* name = r.find("", "name");
  if (!name) r.fail(0, "missing required key 'name'");
  sc.name = name->value;
  for (char c : sc.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      r.fail(name->line, "name may only contain letters, digits, '_' and '-'");

  sc.params.hbar = r.get_number("params", "hbar", 1.0);
  sc.params.m = r.get_number("params", "m", 1.0);
  sc.params.B = r.get_number("params", "B", 1.0);
  for (const char* key : {"hbar", "m", "B"}) {
    const double v = r.get_number("params", key, 1.0);
    if (!(v > 0)) r.fail(r.line_of("params", key), std::string(key) + " must be positive");
  }

  if (!r.has_section("potential")) r.fail(0, "missing required section [potential]");
  if (const Entry* e = r.find("potential", "omega_sq")) sc.potential.omega_sq = parse_omega_sq(r, *e);
  if (const Entry* e = r.find("potential", "force")) sc.potential.force = parse_force(r, *e);

  sc.initial.X0 = r.get_number("initial", "X0", 0.0);
  sc.initial.X_dot0 = r.get_number("initial", "X_dot0", 0.0);

  if (const Entry* e = r.find("ensemble", "positions")) sc.ensemble = parse_ensemble(r, *e);
  if (const Entry* e = r.find("ensemble", "seed")) {
    const double v = r.number(e->value, e->line);
    if (v < 0 || v != std::floor(v) || v > 9.0e15) r.fail(e->line, "seed must be a non-negative integer");
    sc.seed = static_cast<std::uint64_t>(v);
  }

  if (!r.find("window", "t_end")) r.fail(r.section_line("window"), "missing required key 't_end' in [window]");
  sc.window = TimeWindow{0.0, r.get_number("window", "t_end", 0.0)};
  if (!(sc.window.end > 0)) r.fail(r.line_of("window", "t_end"), "t_end must be positive");
  sc.time_samples = r.get_integer("window", "samples", 101);
  if (sc.time_samples < 2) r.fail(r.line_of("window", "samples"), "samples must be at least 2");

  sc.tolerance = r.get_number("solver", "tolerance", kDefaultTolerance);
  if (!(sc.tolerance > 0)) r.fail(r.line_of("solver", "tolerance"), "tolerance must be positive");

  sc.density_grid.x_min = r.get_number("density", "x_min", -10.0);
  sc.density_grid.x_max = r.get_number("density", "x_max", 10.0);
  sc.density_grid.points = r.get_integer("density", "points", 201);
  if (!(sc.density_grid.x_max > sc.density_grid.x_min))
    r.fail(r.line_of("density", "x_max"), "density grid needs x_min < x_max");
  if (sc.density_grid.points < 2) r.fail(r.line_of("density", "points"), "density grid needs at least 2 points");

  OracleConfig& oc = sc.oracle;
  oc.apodization_a = r.get_number("oracle", "apodization", oc.apodization_a);
  oc.x_min = r.get_number("oracle", "x_min", oc.x_min);
  oc.x_max = r.get_number("oracle", "x_max", oc.x_max);
  oc.n_points = r.get_integer("oracle", "n_points", oc.n_points);
  oc.dt = r.get_number("oracle", "dt", oc.dt);
  oc.t_max = r.get_number("oracle", "t_max", std::min(2.0, sc.window.end));
  oc.frame_stride = r.get_integer("oracle", "frame_stride", oc.frame_stride);
  if (const Entry* e = r.find("oracle", "lobe")) {
    const auto w = split_words(e->value);
    if (w.size() != 2) r.fail(e->line, "lobe expects two numbers");
    oc.lobe_lo = r.number(w[0], e->line);
    oc.lobe_hi = r.number(w[1], e->line);
  }
  try {
    oc.validate();
  } catch (const GridError& err) {
    r.fail(r.section_line("oracle"), err.what());
  }
  if (oc.t_max > sc.window.end) r.fail(r.line_of("oracle", "t_max"), "oracle t_max exceeds the window end");

  if (const Entry* e = r.find("output", "artifacts"))
    sc.outputs = parse_artifacts(r, *e);
  else
    sc.outputs = {Artifact::TrajectoriesCsv, Artifact::DensityHeatmap};

  try {
    sc.potential.require_covers(sc.window);
  } catch (const TabulatedWindowError& err) {
    r.fail(r.section_line("potential"), err.what());
  }
  return sc;
}

Scenario parse_scenario_text(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  return parse_scenario(is, source);
}

Scenario load_scenario(const std::string& path_or_name) {
  std::ifstream in(path_or_name);
  if (in) return parse_scenario(in, path_or_name);
  if (auto text = bundled_scenario_text(path_or_name)) return parse_scenario_text(*text, path_or_name);
  throw ConfigError(path_or_name, 0, "cannot open scenario file (and no bundled scenario has that name)");
}

std::vector<std::string> bundled_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::kBundledScenarios) out.push_back(name);
  return out;
}

std::optional<std::string> bundled_scenario_text(const std::string& name) {
  for (const auto& [n, text] : detail::kBundledScenarios)
    if (n == name) return text;
  return std::nullopt;
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  const double t_end = sc.window.end;
  rep.search_horizon = std::max(2.0 * t_end, t_end + 10.0);
  AuxSolution aux;
  try {
    aux = solve_delta(sc.potential, {0.0, rep.search_horizon}, sc.tolerance);
  } catch (const TabulatedWindowError&) {
    rep.search_horizon = t_end;
    aux = solve_delta(sc.potential, sc.window, sc.tolerance);
  }
  rep.caustic_time = aux.caustic_time;
  rep.window_ok = !rep.caustic_time || *rep.caustic_time > t_end;

  // Local momentum at the density-grid edges over the usable part of the window.
  const AuxSolution full = solve_aux(sc.potential, {0.0, rep.window_ok ? t_end : 0.95 * *rep.caustic_time},
                                     sc.params, sc.initial, sc.tolerance);
  const double t_use = full.t_grid(full.size() - 1);
  auto p_max_over = [&](double x_lo, double x_hi, double t_stop) {
    double p = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const AuxSample s = full.sample(std::min(t_stop, t_use) * i / 20);
      for (double x : {x_lo, x_hi}) {
        const double arg = airy_argument(x, s, sc.params);
        p = std::max(p, sc.params.hbar * sc.params.airy_scale() / s.delta * std::sqrt(std::max(0.0, -arg)) +
                            sc.params.m * std::abs(velocity_field(x, s, sc.params)));
      }
    }
    return std::max(p, 1e-12);
  };
  const double p_density = p_max_over(sc.density_grid.x_min, sc.density_grid.x_max, t_use);
  // Resolving |psi|^2 needs half a wavelength per few samples; |psi|^2 oscillates at twice the wavenumber.
  rep.recommended_density_dx = std::numbers::pi * sc.params.hbar / (4.0 * p_density);
  const double p_oracle = p_max_over(sc.oracle.x_min, sc.oracle.x_max, sc.oracle.t_max);
  const double dx_limit = std::numbers::pi * sc.params.hbar / (4.0 * p_oracle);
  int n = 64;
  while ((sc.oracle.x_max - sc.oracle.x_min) / n > dx_limit && n < (1 << 24)) n *= 2;
  rep.recommended_oracle_points = n;

  const double n_particles = static_cast<double>(sc.ensemble.kind == EnsembleSpec::Kind::List
                                                     ? sc.ensemble.values.size()
                                                     : static_cast<std::size_t>(sc.ensemble.count));
  // Rough per-operation costs measured on a laptop-class core.
  double seconds = 0.02 + 2e-6 * n_particles * sc.time_samples * 40 +
                   1.5e-7 * sc.time_samples * sc.density_grid.points;
  if (sc.wants(Artifact::VelocityFieldCsv)) seconds += 5e-8 * sc.time_samples * sc.density_grid.points;
  if (sc.wants(Artifact::ComparisonReport))
    seconds += 6e-8 * sc.oracle.n_points * std::log2(sc.oracle.n_points) * (sc.oracle.t_max / sc.oracle.dt);
  rep.estimated_seconds = seconds;

  std::ostringstream os;
  os << "scenario: " << sc.name << "\n";
  os << "window: [0, " << format_number(t_end) << "]\n";
  if (rep.caustic_time)
    os << "caustic_time: " << format_number(*rep.caustic_time) << "\n";
  else
    os << "caustic_time: none (no caustic before t = " << format_number(rep.search_horizon) << ")\n";
  os << "window status: "
     << (rep.window_ok ? "ok" : "crosses the caustic; shorten t_end below " + format_number(*rep.caustic_time))
     << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "density grid: dx = %.4g (recommended <= %.4g)\n",
                (sc.density_grid.x_max - sc.density_grid.x_min) / (sc.density_grid.points - 1),
                rep.recommended_density_dx);
  os << buf;
  std::snprintf(buf, sizeof buf, "oracle grid: n_points = %d (recommended >= %d over [%g, %g])\n",
                sc.oracle.n_points, rep.recommended_oracle_points, sc.oracle.x_min, sc.oracle.x_max);
  os << buf;
  std::snprintf(buf, sizeof buf, "estimated runtime: %.2g s\n", rep.estimated_seconds);
  os << buf;
  rep.text = os.str();
  return rep;
}

}  // namespace airybohm
