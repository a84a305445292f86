// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
//
// Exit status is 0 when every criterion passes, or, with --expect-fail, when
// exactly the listed criteria fail and all others pass.

#include <CLI11.hpp>

#include <airybohm/errors.hpp>
#include <airybohm/oracle_pde.hpp>
#include <airybohm/scenario.hpp>
#include <airybohm/specfun.hpp>
#include <airybohm/trajectories.hpp>
#include <airybohm/wavefunction.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "airy_oracle.hpp"
#include "support.hpp"

using namespace airybohm;
using namespace support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + note);
  }
  void info(const std::string& note) { notes.push_back("     " + note); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double ai(double z) { return airy_ai(z).ai; }

// 1. Berry-Balazs reduction.
Outcome berry_balazs() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const PhysicalParams p;
  for (double f0 : {0.0, 1.0}) {
    const AuxSolution aux = aux_for(constant_force(f0), 5.0);
    double worst = 0.0;
    for (int j = 0; j < 50; ++j) {
      const double t = 5.0 * j / 49;
      for (int i = 0; i < 100; ++i) {
        const double x = -10.0 + 20.0 * i / 99;
        // (1/m) int_0^t F0 (t - tau) dtau = F0 t^2 / 2
        const double direct = std::pow(ai(x - f0 * t * t / 2 - t * t / 4), 2);
        worst = std::max(worst, std::abs(density(x, t, p, aux) - direct));
      }
    }
    out.require(worst <= 1e-10, "F0 = " + fmt("%g", f0) + ": max |density - direct| = " + sci(worst) + " (<= 1e-10)");
  }
  const double elapsed = seconds_since(t0);
  out.require(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s (< 1 s)");
  return out;
}

// 2. Free-packet trajectories.
Outcome free_trajectories() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const PhysicalParams p;
  const AuxSolution aux = aux_for(free_potential(), 5.0);
  const std::vector<double> starts = default_initial_positions(p, 0.0, 11);
  const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(101, 0.0, 5.0);
  const TrajectoryEnsemble closed = build_ensemble(starts, t, TrajectoryMethod::ClosedForm, p, aux);
  const TrajectoryEnsemble integ = build_ensemble(starts, t, TrajectoryMethod::IntegratedGuidance, p, aux);
  double vs_parabola = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (Eigen::Index k = 0; k < t.size(); ++k)
      vs_parabola = std::max(vs_parabola, std::abs(closed.paths(static_cast<Eigen::Index>(i), k) -
                                                   (starts[i] + t(k) * t(k) / 4)));
  const double agreement = (closed.paths - integ.paths).cwiseAbs().maxCoeff();
  const double elapsed = seconds_since(t0);
  out.require(vs_parabola <= 1e-9, "closed form vs x0 + t^2/4: " + sci(vs_parabola) + " (<= 1e-9)");
  out.require(agreement <= 1e-6, "integrated vs closed form, 11 starts, t in [0, 5]: " + sci(agreement) + " (<= 1e-6)");
  out.require(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s (< 1 s)");
  return out;
}

// 3. Double-integral identity.
Outcome double_integral() {
  Outcome out;
  struct Case {
    const char* name;
    PotentialSpec pot;
    double t_end;
  };
  const Case cases[] = {{"free, t <= 5", free_potential(), 5.0},
                        {"harmonic, t <= 1.4", harmonic(1.0), 1.4},
                        {"Mathieu(a=1, q=0.2), t <= 3", mathieu(1.0, 0.2), 3.0}};
  for (const Case& c : cases) {
    const AuxSolution aux = solve_delta(c.pot, {0.0, c.t_end});
    double worst = 0.0, reached = 0.0;
    std::string failure;
    for (int i = 1; i <= 60; ++i) {
      const double t = c.t_end * i / 60;
      try {
        const double tp = reparametrized_time(aux, t);
        worst = std::max(worst, std::abs(nested_double_integral_quadrature(aux, t) - tp * tp / 2));
        reached = t;
      } catch (const CausticDomainError& e) {
        failure = e.what();
        break;
      }
    }
    if (failure.empty()) {
      out.require(worst <= 1e-8, std::string(c.name) + ": max |I_quad - t'^2/2| = " + sci(worst) + " (<= 1e-8)");
    } else {
      out.require(false, std::string(c.name) + ": I(t) diverges at the caustic t_c = " +
                             fmt("%.10f", *aux.caustic_time) + " < " + fmt("%g", c.t_end));
      out.info("identity holds up to t = " + fmt("%.4f", reached) + " with max deviation " + sci(worst));
      out.info(failure);
    }
  }
  return out;
}

// 4. Wronskian of the fundamental pair.
Outcome wronskian() {
  Outcome out;
  const std::pair<const char*, PotentialSpec> cases[] = {
      {"free", free_potential()}, {"harmonic", harmonic(1.0)}, {"Mathieu(a=1, q=0.2)", mathieu(1.0, 0.2)}};
  for (const auto& [name, pot] : cases) {
    const FundamentalPair fp = fundamental_solutions(pot, {0.0, 10.0});
    const double drift = (fp.wronskian() - 1.0).abs().maxCoeff();
    out.require(drift <= 1e-7, std::string(name) + ": max |W - 1| over [0, 10] = " + sci(drift) + " (<= 1e-7)");
  }
  // delta2 = delta t' where the analytic construction is valid
  const AuxSolution h = solve_delta(harmonic(1.0), {0.0, 1.4});
  const FundamentalPair fh = fundamental_solutions(harmonic(1.0), {0.0, 1.4});
  double worst = 0.0;
  for (Eigen::Index i = 0; i < fh.t_grid.size(); ++i)
    worst = std::max(worst, std::abs(fh.delta2(i) - second_solution(h, fh.t_grid(i))));
  out.require(worst <= 1e-7, "harmonic: delta2 from integration vs delta t' on [0, 1.4]: " + sci(worst));
  return out;
}

struct Scene {
  std::string name;
  Scenario sc;
  AuxSolution aux;
};

std::vector<Scene> bundled_scenes() {
  std::vector<Scene> out;
  for (const auto& n : bundled_scenario_names()) {
    Scenario sc = load_scenario(n);
    AuxSolution aux = solve_aux(sc.potential, sc.window, sc.params, sc.initial, sc.tolerance);
    out.push_back({n, std::move(sc), std::move(aux)});
  }
  return out;
}

// 5. Argument invariance and probability transport along closed-form paths.
Outcome invariance(const std::vector<Scene>& scenes) {
  Outcome out;
  for (const Scene& s : scenes) {
    const Eigen::ArrayXd t = s.sc.time_grid();
    double arg_dev = 0.0, transport = 0.0;
    for (double x0 : s.sc.initial_positions()) {
      const double arg0 = airy_argument(x0, 0.0, s.sc.params, s.aux);
      const double rho0 = density(x0, 0.0, s.sc.params, s.aux);
      for (Eigen::Index k = 0; k < t.size(); ++k) {
        const double x = closed_form_trajectory(x0, t(k), s.sc.params, s.aux);
        arg_dev = std::max(arg_dev, std::abs(airy_argument(x, t(k), s.sc.params, s.aux) - arg0));
        transport = std::max(transport, std::abs(density(x, t(k), s.sc.params, s.aux) * s.aux.delta_at(t(k)) - rho0));
      }
    }
    out.require(arg_dev <= 1e-8 && transport <= 1e-8,
                s.name + ": argument drift " + sci(arg_dev) + ", transport " + sci(transport) + " (<= 1e-8)");
  }
  return out;
}

// 6. Finite-difference guidance against the analytic velocity field.
Outcome guidance(const std::vector<Scene>& scenes) {
  Outcome out;
  for (const Scene& s : scenes) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> td(0.0, s.sc.window.end), ad(-6.0, 1.5);
    const PhysicalParams& p = s.sc.params;
    double worst = 0.0;
    int used = 0;
    while (used < 200) {
      const double t = td(rng);
      const AuxSample a = s.aux.sample(t);
      const double x = a.X + a.delta * (ad(rng) / p.airy_scale() + 0.5 * p.acceleration() * a.t_prime * a.t_prime);
      if (std::abs(ai(airy_argument(x, t, p, s.aux))) < 1e-6) continue;
      const double h = 1e-5;
      const std::complex<double> c = complex_psi(x, t, p, s.aux);
      const std::complex<double> d = (complex_psi(x + h, t, p, s.aux) - complex_psi(x - h, t, p, s.aux)) / (2 * h);
      worst = std::max(worst, std::abs(p.hbar / p.m * (d / c).imag() - velocity_field(x, t, p, s.aux)));
      ++used;
    }
    out.require(worst <= 1e-6, s.name + ": 200 samples, max |v_fd - v| = " + sci(worst) + " (<= 1e-6)");
  }
  return out;
}

// 7. Split-step oracle for the apodized free packet.
Outcome pde_oracle() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const OracleConfig cfg;  // a = 0.1, 4096 points on [-30, 15], dt = 1e-3, t_max = 2
  const PhysicalParams p;
  const AuxSolution aux = aux_for(free_potential(), cfg.t_max);
  const auto frames = evolve_split_step(initialize_packet(cfg, p), free_potential(), p, cfg.dt, cfg.n_steps(),
                                        cfg.frame_stride);
  const ComparisonReport rep = compare_with_analytic(frames, p, aux, cfg);
  const double elapsed = seconds_since(t0);
  out.require(rep.norm_drift <= 1e-8, "norm drift over [0, 2]: " + sci(rep.norm_drift) + " (<= 1e-8)");
  out.require(rep.max_trajectory_deviation <= 1e-2,
              "main-lobe trajectories vs closed form: max deviation " + fmt("%.4f", rep.max_trajectory_deviation) +
                  " (<= 1e-2)");
  if (rep.max_trajectory_deviation > 1e-2) {
    for (Eigen::Index c : {Eigen::Index(50), Eigen::Index(100), Eigen::Index(200)})
      out.info("deviation at t = " + fmt("%.2f", rep.t(c)) + ": " + fmt("%.4f", rep.trajectory_deviation(c)));
    out.info("the exp(a x) apodization changes the Bohmian paths themselves; exact finite-energy");
    out.info("paths from x0 = -1 reach -0.2223 at t = 2 against -0.0000 for the ideal packet");
  }
  const double rel = std::abs(rep.peak_coefficient - rep.expected_peak_coefficient) / rep.expected_peak_coefficient;
  out.require(rel <= 0.02, "lobe-peak t^2 coefficient " + fmt("%.6f", rep.peak_coefficient) + " vs " +
                               fmt("%.4f", rep.expected_peak_coefficient) + ", relative error " + fmt("%.4f", rel) +
                               " (<= 0.02)");
  out.info("outer 5% boundary mass (monitor): max " + sci(rep.max_boundary_mass));
  out.require(elapsed < 60.0, "runtime " + fmt("%.2f", elapsed) + " s (< 60 s)");
  return out;
}

// 8. Caustic handling for the harmonic scenario.
Outcome caustics() {
  Outcome out;
  Scenario sc = load_scenario("harmonic_focus");
  const ValidationReport v = validate_scenario(sc);
  const double err = v.caustic_time ? std::abs(*v.caustic_time - std::numbers::pi / 2) : INFINITY;
  out.require(err <= 1e-9, "caustic_time = " + (v.caustic_time ? fmt("%.16f", *v.caustic_time) : std::string("none")) +
                               ", |error| = " + sci(err) + " (<= 1e-9)");

  sc.window.end = 1.6;
  std::ostringstream log;
  const fs::path dir = fs::temp_directory_path() / "airybohm-acceptance-caustic";
  fs::remove_all(dir);
  const int code = run_scenario(sc, dir, {}, log);
  const bool named = log.str().find("caustic_time = 1.5707963267") != std::string::npos;
  out.require(code == kExitNumeric && named, "window to t = 1.6 refused with exit " + std::to_string(code) +
                                                  (named ? ", caustic named" : ", caustic not named"));
  fs::remove_all(dir);

  const AuxSolution aux = solve_delta(harmonic(1.0), {0.0, 1.6});
  bool structured = false;
  try {
    aux.sample(1.6);
  } catch (const CausticDomainError& e) {
    structured = std::abs(e.caustic_time() - std::numbers::pi / 2) <= 1e-9 && e.requested_time() == 1.6;
  }
  out.require(structured, "evaluation past the caustic raises CausticDomainError(t, caustic_time)");
  return out;
}

// 9. Airy function against the extended-precision series.
Outcome special_functions() {
  Outcome out;
  double worst = 0.0, worst_p = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double z = -10.0 + 0.005 * i;
    const AiryValue v = airy_ai(z);
    const airy_oracle::Value o = airy_oracle::evaluate(z);
    worst = std::max(worst, std::abs(v.ai - o.ai) / std::max(std::abs(o.ai), airy_oracle::envelope(z)));
    worst_p = std::max(worst_p,
                       std::abs(v.ai_prime - o.ai_prime) / std::max(std::abs(o.ai_prime), airy_oracle::envelope_prime(z)));
  }
  out.require(worst <= 1e-12 && worst_p <= 1e-12,
              "|z| <= 10: relative error Ai " + sci(worst) + ", Ai' " + sci(worst_p) + " (<= 1e-12)");
  double ode = 0.0;
  const double h = 3e-3;
  for (int i = 0; i <= 2000; ++i) {
    const double z = -10.0 + 0.01 * i;
    const double d2 = (-ai(z + 2 * h) + 16 * ai(z + h) - 30 * ai(z) + 16 * ai(z - h) - ai(z - 2 * h)) / (12 * h * h);
    ode = std::max(ode, std::abs(d2 - z * ai(z)));
  }
  out.require(ode <= 1e-8, "max |Ai'' - z Ai| by finite differences: " + sci(ode) + " (<= 1e-8)");
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 10. Byte-identical CSVs across two runs.
Outcome determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "airybohm-acceptance-determinism";
  for (const auto& n : bundled_scenario_names()) {
    const fs::path a = root / (n + "-1"), b = root / (n + "-2");
    fs::remove_all(a);
    fs::remove_all(b);
    std::ostringstream log;
    const int ca = run_scenario(load_scenario(n), a, {}, log);
    const int cb = run_scenario(load_scenario(n), b, {}, log);
    int files = 0, identical = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      identical += slurp(e.path()) == slurp(b / e.path().filename());
    }
    out.require(ca == 0 && cb == 0 && files > 0 && identical == files,
                n + ": " + std::to_string(identical) + "/" + std::to_string(files) + " CSV files identical");
  }
  fs::remove_all(root);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail (comma separated)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Scene> scenes = bundled_scenes();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Berry-Balazs reduction", berry_balazs},
      {"free-packet trajectories", free_trajectories},
      {"double-integral identity", double_integral},
      {"Wronskian", wronskian},
      {"argument invariance and transport", [&] { return invariance(scenes); }},
      {"guidance consistency", [&] { return guidance(scenes); }},
      {"split-step oracle", pde_oracle},
      {"caustic handling", caustics},
      {"special functions", special_functions},
      {"determinism", determinism},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("unexpected error: ") + e.what());
    }
    std::printf("criterion %2d %-36s %s  (%.2f s)\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                seconds_since(t0));
    for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
    if (!o.pass) failed.insert(id);
  }

  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::printf("\n%zu of %zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!failed.empty()) {
    std::printf("; failing:");
    for (int id : failed) std::printf(" %d", id);
  }
  std::printf("\n");
  if (!expected.empty()) {
    const bool match = failed == expected;
    std::printf("expected failures:");
    for (int id : expected) std::printf(" %d", id);
    std::printf(" -> %s\n", match ? "as expected" : "MISMATCH");
    return match ? 0 : 1;
  }
  return failed.empty() ? 0 : 1;
}
