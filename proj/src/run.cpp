#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "airybohm/scenario.hpp"
#include "airybohm/trajectories.hpp"
#include "airybohm/wavefunction.hpp"

namespace airybohm {

namespace {

// Thresholds shared with the acceptance suite.
constexpr double kMethodAgreement = 1e-6;
constexpr double kArgumentInvariance = 1e-8;
constexpr double kTransport = 1e-8;
constexpr double kIdentity = 1e-8;
constexpr double kWronskianDrift = 1e-7;
constexpr double kGuidanceTolerance = 1e-9;

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

std::string check_line(const Check& c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-4s %-24s max = %.3e  (threshold %.0e)\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.threshold);
  return buf;
}

std::vector<Check> invariant_checks(const Scenario& sc, const AuxSolution& aux, const TrajectoryEnsemble& closed,
                                    const TrajectoryEnsemble& integrated) {
  std::vector<Check> checks;
  const auto& p = sc.params;

  const double agreement = closed.size() ? (closed.paths - integrated.paths).cwiseAbs().maxCoeff() : 0.0;
  checks.push_back({"method_agreement", agreement, kMethodAgreement, agreement <= kMethodAgreement});

  double arg_drift = 0.0, transport = 0.0;
  const AuxSample s0 = aux.sample(0.0);
  for (Eigen::Index k = 0; k < closed.t_grid.size(); ++k) {
    const AuxSample s = aux.sample(closed.t_grid(k));
    for (Eigen::Index i = 0; i < closed.paths.rows(); ++i) {
      const double x0 = closed.paths(i, 0), x = closed.paths(i, k);
      arg_drift = std::max(arg_drift, std::abs(airy_argument(x, s, p) - airy_argument(x0, s0, p)));
      transport =
          std::max(transport, std::abs(density(x, s, p) * s.delta / aux.delta0 - density(x0, s0, p)));
    }
  }
  checks.push_back({"argument_invariance", arg_drift, kArgumentInvariance, arg_drift <= kArgumentInvariance});
  checks.push_back({"probability_transport", transport, kTransport, transport <= kTransport});

  // Order violations counted over both ensembles; value is the number of violations.
  std::vector<Eigen::Index> order(closed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return closed.initial_positions[static_cast<std::size_t>(a)] < closed.initial_positions[static_cast<std::size_t>(b)];
  });
  double crossings = 0;
  for (const auto* ens : {&closed, &integrated}) {
    for (std::size_t j = 1; j < order.size(); ++j) {
      const auto a = order[j - 1], b = order[j];
      if (ens->initial_positions[static_cast<std::size_t>(a)] == ens->initial_positions[static_cast<std::size_t>(b)])
        continue;
      for (Eigen::Index k = 0; k < ens->t_grid.size(); ++k)
        if (!(ens->paths(a, k) < ens->paths(b, k))) ++crossings;
    }
  }
  checks.push_back({"no_crossing", crossings, 0.0, crossings == 0});

  double identity = 0.0;
  for (int j = 1; j <= 5; ++j) {
    const double t = sc.window.end * j / 5;
    identity = std::max(identity, std::abs(nested_double_integral_quadrature(aux, t) - nested_double_integral(aux, t)));
  }
  checks.push_back({"double_integral_identity", identity, kIdentity, identity <= kIdentity});

  const FundamentalPair pair = fundamental_solutions(sc.potential, sc.window, sc.tolerance);
  const double wronskian = (pair.wronskian() - 1.0).abs().maxCoeff();
  checks.push_back({"wronskian", wronskian, kWronskianDrift, wronskian <= kWronskianDrift});
  return checks;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string trajectories_csv(const TrajectoryEnsemble& ens) {
  std::string out = "t";
  for (std::size_t i = 0; i < ens.size(); ++i) out += ",x_" + std::to_string(i + 1);
  out += "\n";
  for (Eigen::Index k = 0; k < ens.t_grid.size(); ++k) {
    out += format_number(ens.t_grid(k));
    for (Eigen::Index i = 0; i < ens.paths.rows(); ++i) out += "," + format_number(ens.paths(i, k));
    out += "\n";
  }
  return out;
}

std::string field_csv(const char* column, const Eigen::ArrayXd& t, const Eigen::ArrayXd& x, const Eigen::MatrixXd& v) {
  std::string out = std::string("t,x,") + column + "\n";
  for (Eigen::Index k = 0; k < t.size(); ++k)
    for (Eigen::Index j = 0; j < x.size(); ++j)
      out += format_number(t(k)) + "," + format_number(x(j)) + "," + format_number(v(k, j)) + "\n";
  return out;
}

// Viridis-like ramp through five anchor colours.
std::string colour(double u) {
  static const double anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double f = u - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(anchors[i][0] + f * (anchors[i + 1][0] - anchors[i][0])),
                static_cast<int>(anchors[i][1] + f * (anchors[i + 1][1] - anchors[i][1])),
                static_cast<int>(anchors[i][2] + f * (anchors[i + 1][2] - anchors[i][2])));
  return buf;
}

// Trajectory fan over the density heat map; renders the CSV data only.
std::string plot_svg(const Scenario& sc, const TrajectoryEnsemble& ens, const Eigen::ArrayXd& x,
                     const Eigen::MatrixXd& rho) {
  const double w = 720, h = 480, left = 60, top = 20, right = 20, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  const double t0 = 0.0, t1 = sc.window.end;
  const double x0 = x(0), x1 = x(x.size() - 1);
  auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double xv) { return top + (x1 - xv) / (x1 - x0) * ph; };
  char buf[256];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << " " << h << "\">\n";
  os << "<title>" << sc.name << ": Bohmian trajectories over |psi|^2</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g shape-rendering=\"crispEdges\">\n";
  const Eigen::Index nt = rho.rows(), nx = rho.cols();
  const Eigen::Index st = std::max<Eigen::Index>(1, nt / 120), sx = std::max<Eigen::Index>(1, nx / 160);
  const double peak = std::max(rho.maxCoeff(), 1e-300);
  for (Eigen::Index k = 0; k < nt; k += st) {
    const double ta = ens.t_grid(k), tb = ens.t_grid(std::min(k + st, nt - 1));
    const double tw = std::max(px(tb) - px(ta), pw / static_cast<double>(nt));
    for (Eigen::Index j = 0; j < nx; j += sx) {
      const double xa = x(j), xb = x(std::min(j + sx, nx - 1));
      const double ya = py(xb), hh = std::max(py(xa) - py(xb), ph / static_cast<double>(nx));
      std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                    px(ta), ya, tw, hh, colour(std::sqrt(rho(k, j) / peak)).c_str());
      os << buf;
    }
  }
  os << "</g>\n<g fill=\"none\" stroke=\"white\" stroke-width=\"1.2\">\n";
  for (Eigen::Index i = 0; i < ens.paths.rows(); ++i) {
    os << "<polyline points=\"";
    for (Eigen::Index k = 0; k < ens.t_grid.size(); ++k) {
      const double y = std::clamp(py(ens.paths(i, k)), top, top + ph);
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", k ? " " : "", px(ens.t_grid(k)), y);
      os << buf;
    }
    os << "\"/>\n";
  }
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  os << buf;
  for (int i = 0; i <= 4; ++i) {
    const double tv = t0 + (t1 - t0) * i / 4, xv = x0 + (x1 - x0) * i / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", px(tv),
                  top + ph + 16, tv);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", left - 6,
                  py(xv) + 4, xv);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">t</text>\n", left + pw / 2,
                h - 10);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"14\" y=\"%.1f\" text-anchor=\"middle\">x</text>\n", top + ph / 2);
  os << buf;
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string comparison_text(const Scenario& sc, const AuxSolution& aux) {
  const OracleConfig& cfg = sc.oracle;
  check_resolution(cfg, sc.params, aux);
  Diagnostics diag;
  const WaveField f0 = initialize_packet(cfg, sc.params, sc.initial.X0, &diag);
  const auto frames = evolve_split_step(f0, sc.potential, sc.params, cfg.dt, cfg.n_steps(), cfg.frame_stride);
  const ComparisonReport rep = compare_with_analytic(frames, sc.params, aux, cfg);
  std::ostringstream os;
  char buf[200];
  os << "split-step oracle: a = " << cfg.apodization_a << ", domain [" << cfg.x_min << ", " << cfg.x_max << "], "
     << cfg.n_points << " points, dt = " << cfg.dt << ", t_max = " << cfg.t_max << "\n";
  for (const auto& w : diag.warnings) os << "warning: " << w << "\n";
  std::snprintf(buf, sizeof buf, "norm drift: %.3e\n", rep.norm_drift);
  os << buf;
  std::snprintf(buf, sizeof buf, "boundary mass (outer 5%% of cells, max over frames): %.3e%s\n", rep.max_boundary_mass,
                rep.max_boundary_mass <= 1e-6 ? "" : "  [above 1e-6 monitor level]");
  os << buf;
  std::snprintf(buf, sizeof buf, "max trajectory deviation (lobe starts): %.6e\n", rep.max_trajectory_deviation);
  os << buf;
  std::snprintf(buf, sizeof buf, "max lobe-peak deviation: %.6e\n", rep.max_peak_deviation);
  os << buf;
  std::snprintf(buf, sizeof buf, "lobe-peak t^2 coefficient: %.6f (closed form %.6f, relative %.3e)\n",
                rep.peak_coefficient, rep.expected_peak_coefficient,
                std::abs(rep.peak_coefficient / rep.expected_peak_coefficient - 1.0));
  os << buf;
  os << "t,max_deviation,peak,peak_closed_form\n";
  const Eigen::Index stride = std::max<Eigen::Index>(1, rep.t.size() / 20);
  for (Eigen::Index c = 0; c < rep.t.size(); c += stride)
    os << format_number(rep.t(c)) << "," << format_number(rep.trajectory_deviation(c)) << ","
       << format_number(rep.peak(c)) << "," << format_number(rep.peak_expected(c)) << "\n";
  return os.str();
}

}  // namespace

int run_scenario(Scenario sc, const std::filesystem::path& out_dir, const RunOptions& options, std::ostream& log) {
  if (options.tolerance) sc.tolerance = *options.tolerance;
  if (options.seed) sc.seed = *options.seed;
  try {
    const AuxSolution aux = solve_aux(sc.potential, sc.window, sc.params, sc.initial, sc.tolerance);
    if (aux.caustic_time) {
      log << sc.name << ": caustic reached inside window: caustic_time = " << format_number(*aux.caustic_time)
          << " but the window ends at t = " << format_number(sc.window.end) << "\n";
      return kExitNumeric;
    }
    const Eigen::ArrayXd t_grid = sc.time_grid();
    const std::vector<double> starts = sc.initial_positions();
    const TrajectoryEnsemble closed =
        build_ensemble(starts, t_grid, TrajectoryMethod::ClosedForm, sc.params, aux);
    const TrajectoryEnsemble integrated =
        build_ensemble(starts, t_grid, TrajectoryMethod::IntegratedGuidance, sc.params, aux, kGuidanceTolerance);
    const std::vector<Check> checks = invariant_checks(sc, aux, closed, integrated);

    std::filesystem::create_directories(out_dir);
    const Eigen::ArrayXd x =
        Eigen::ArrayXd::LinSpaced(sc.density_grid.points, sc.density_grid.x_min, sc.density_grid.x_max);
    Eigen::MatrixXd rho;
    if (sc.wants(Artifact::DensityHeatmap) || sc.wants(Artifact::Plot)) {
      rho.resize(t_grid.size(), x.size());
      for (Eigen::Index k = 0; k < t_grid.size(); ++k) rho.row(k) = density(x, t_grid(k), sc.params, aux).matrix().transpose();
    }
    if (sc.wants(Artifact::TrajectoriesCsv)) write_file(out_dir / "trajectories.csv", trajectories_csv(closed));
    if (sc.wants(Artifact::DensityHeatmap)) write_file(out_dir / "density.csv", field_csv("density", t_grid, x, rho));
    if (sc.wants(Artifact::VelocityFieldCsv)) {
      Eigen::MatrixXd v(t_grid.size(), x.size());
      for (Eigen::Index k = 0; k < t_grid.size(); ++k)
        v.row(k) = velocity_field(x, t_grid(k), sc.params, aux).matrix().transpose();
      write_file(out_dir / "velocity_field.csv", field_csv("v", t_grid, x, v));
    }
    if (sc.wants(Artifact::Plot)) write_file(out_dir / "trajectories.svg", plot_svg(sc, closed, x, rho));

    std::ostringstream report;
    report << "scenario: " << sc.name << "\n";
    report << "window: [0, " << format_number(sc.window.end) << "], " << sc.time_samples << " samples, "
           << starts.size() << " particles\n";
    report << "solver tolerance: " << sc.tolerance << ", guidance tolerance: " << kGuidanceTolerance << "\n";
    bool all_pass = true;
    for (const auto& c : checks) {
      report << check_line(c);
      all_pass = all_pass && c.pass;
    }
    if (sc.wants(Artifact::ComparisonReport)) {
      const std::string text = comparison_text(sc, aux);
      write_file(out_dir / "comparison.txt", text);
      report << "comparison: see comparison.txt\n";
    }
    write_file(out_dir / "report.txt", report.str());
    log << sc.name << ": " << (all_pass ? "all checks passed" : "some checks FAILED (see report.txt)") << "\n";
    return all_pass ? kExitOk : kExitNumeric;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << sc.name << ": numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    log << sc.name << ": invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace airybohm
