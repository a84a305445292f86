#include <doctest.h>

#include <airybohm/specfun.hpp>
#include <airybohm/wavefunction.hpp>

#include <cmath>
#include <complex>
#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "support.hpp"

using namespace airybohm;
using namespace support;

namespace {

double ai(double z) { return airy_ai(z).ai; }

// Direct Berry-Balazs density with a linear potential F(t) x and delta = 1.
// Direct Berry-Balazs density with a linear potential F(t) x and delta = 1.
// force is piecewise linear with the given knots, so Simpson on each piece of
// F(tau) (t - tau) is exact.
double berry_balazs(double x, double t, const PhysicalParams& p, const std::function<double(double)>& force,
                    std::vector<double> knots = {}) {
  knots.push_back(0.0);
  knots.push_back(t);
  std::sort(knots.begin(), knots.end());
  double drift = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = std::min(knots[i + 1], t);
    if (b <= a || a >= t) continue;
    auto g = [&](double tau) { return force(tau) * (t - tau); };
    drift += (b - a) / 6.0 * (g(a) + 4 * g(0.5 * (a + b)) + g(b));
  }
  drift /= p.m;
  const double arg = p.B / std::cbrt(p.hbar * p.hbar) * (x - drift - p.B * p.B * p.B * t * t / (4 * p.m * p.m));
  const double a = ai(arg);
  return a * a;
}

// (hbar/m) Im d/dx log psi by central differences.
double fd_velocity(double x, double t, const PhysicalParams& p, const AuxSolution& aux) {
  const double h = 1e-5;
  const std::complex<double> c = complex_psi(x, t, p, aux);
  const std::complex<double> d = (complex_psi(x + h, t, p, aux) - complex_psi(x - h, t, p, aux)) / (2 * h);
  return p.hbar / p.m * (d / c).imag();
}

}  // namespace

TEST_CASE("airy_argument") {
  const AuxSolution free_aux = aux_for(free_potential(), 5.0);
  const PhysicalParams p;
  CHECK(airy_argument(0.0, 0.0, p, free_aux) == 0.0);
  for (double t = 0.0; t <= 5.0; t += 0.5)
    for (double x = -4.0; x <= 4.0; x += 1.0)
      CHECK(std::abs(airy_argument(x, t, p, free_aux) - (x - t * t / 4)) <= 1e-12);

  const AuxSolution h = aux_for(harmonic(1.0), 1.4);
  for (double t = 0.0; t <= 1.4; t += 0.1) {
    const double tn = std::tan(t);
    CHECK(std::abs(airy_argument(0.0, t, p, h) + tn * tn / 4) <= 1e-8 * std::max(1.0, tn * tn));
  }
}

TEST_CASE("airy_argument scales with B / hbar^(2/3)") {
  PhysicalParams p;
  p.hbar = 0.5;
  p.B = 1.3;
  p.m = 2.0;
  const AuxSolution aux = aux_for(free_potential(), 2.0, {}, p);
  const double kappa = 1.3 / std::cbrt(0.25);
  const double accel = 1.3 * 1.3 * 1.3 / (4 * 4.0);
  CHECK(std::abs(airy_argument(0.7, 1.5, p, aux) - kappa * (0.7 - accel * 1.5 * 1.5)) <= 1e-12);
}

TEST_CASE("density") {
  const PhysicalParams p;
  const AuxSolution f = aux_for(free_potential(), 5.0);
  const double ai0 = ai(0.0);
  CHECK(std::abs(ai0 * ai0 - 0.126045) <= 1e-6);
  for (double t = 0.0; t <= 5.0; t += 1.0) CHECK(std::abs(density(t * t / 4, t, p, f) - ai0 * ai0) <= 1e-14);

  ForcedInitial ics{0.4, 0.0};
  const AuxSolution g = aux_for(free_potential(), 1.0, ics);
  for (double x = -3.0; x <= 3.0; x += 0.5) CHECK(density(x, 0.0, p, g) == doctest::Approx(std::pow(ai(x - 0.4), 2)));

  const AuxSolution h = aux_for(harmonic(1.0), 1.4);
  const double a0 = -1.3;
  for (double t = 0.0; t <= 1.4; t += 0.1) {
    const double tn = std::tan(t);
    const double x = std::cos(t) * (a0 + tn * tn / 4);
    CHECK(density(x, t, p, h) == doctest::Approx(ai(a0) * ai(a0) / std::cos(t)).epsilon(1e-8));
  }
}

TEST_CASE("Berry-Balazs reduction on a 100 x 50 grid") {
  const PhysicalParams p;
  for (double f0 : {0.0, 1.0, -0.6}) {
    const AuxSolution aux = aux_for(constant_force(f0), 5.0);
    double worst = 0.0;
    for (int j = 0; j < 50; ++j) {
      const double t = 5.0 * j / 49;
      for (int i = 0; i < 100; ++i) {
        const double x = -10.0 + 20.0 * i / 99;
        worst = std::max(worst, std::abs(density(x, t, p, aux) - berry_balazs(x, t, p, [f0](double) { return f0; })));
      }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("Berry-Balazs reduction with a time-dependent force") {
  PhysicalParams p;
  p.m = 1.5;
  p.B = 0.8;
  PotentialSpec pot;
  pot.force = TabulatedTerm{{0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, -0.5, 0.25}};
  const AuxSolution aux = aux_for(pot, 3.0, {}, p);
  auto force = [&pot](double tau) { return pot.force_at(tau); };
  for (double t = 0.0; t <= 3.0; t += 0.25)
    for (double x = -6.0; x <= 4.0; x += 0.5)
      CHECK(std::abs(density(x, t, p, aux) - berry_balazs(x, t, p, force, {1.0, 2.0})) <= 1e-10);
}

TEST_CASE("velocity_field") {
  const PhysicalParams p;
  const AuxSolution f = aux_for(free_potential(), 5.0);
  for (double x = -5.0; x <= 5.0; x += 1.0) CHECK(velocity_field(x, 0.0, p, f) == 0.0);
  for (double t = 0.0; t <= 5.0; t += 0.5)
    for (double x = -5.0; x <= 5.0; x += 2.5) CHECK(std::abs(velocity_field(x, t, p, f) - t / 2) <= 1e-12);

  const AuxSolution h = aux_for(harmonic(1.0), 1.4);
  for (double t = 0.0; t <= 1.4; t += 0.1)
    for (double x = -3.0; x <= 3.0; x += 1.0) {
      const double tn = std::tan(t);
      CHECK(std::abs(velocity_field(x, t, p, h) - (-x * tn + tn / (2 * std::cos(t)))) <= 1e-7 * (1 + std::abs(x)) * (1 + tn * tn));
    }
}

TEST_CASE("array overloads match scalar calls") {
  const PhysicalParams p;
  const AuxSolution h = aux_for(harmonic(1.0), 1.0);
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(17, -4, 4);
  const Eigen::ArrayXd rho = density(x, 0.7, p, h), v = velocity_field(x, 0.7, p, h);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    CHECK(rho(i) == density(x(i), 0.7, p, h));
    CHECK(v(i) == velocity_field(x(i), 0.7, p, h));
  }
  const WavePoint w = wave_point(-1.0, 0.7, p, h);
  CHECK(w.amplitude_sq == density(-1.0, 0.7, p, h));
  CHECK(w.phase_gradient == doctest::Approx(p.m * velocity_field(-1.0, 0.7, p, h)));
  CHECK(w.airy_argument == airy_argument(-1.0, 0.7, p, h));
}

TEST_CASE("complex_psi") {
  const PhysicalParams p;
  const AuxSolution f = aux_for(free_potential(), 2.0);
  const double t_peak = 1.0;
  CHECK(std::norm(complex_psi(t_peak * t_peak / 4, t_peak, p, f)) == doctest::Approx(density(0.25, 1.0, p, f)));
  auto phase_diff = [&](double t) {
    return std::arg(complex_psi(1.0, t, p, f) / complex_psi(0.0, t, p, f));
  };
  CHECK(std::abs(phase_diff(0.0)) <= 1e-14);
  CHECK(std::abs(phase_diff(1.0) - 0.5) <= 1e-12);
  CHECK(std::abs(std::arg(complex_psi(0.0, 1.3, p, f, 0.0)) - (ai(-1.69 / 4) < 0 ? M_PI : 0.0)) <= 1e-14);
}

TEST_CASE("finite-difference guidance matches velocity_field away from nodes") {
  const PhysicalParams p;
  struct Case {
    PotentialSpec pot;
    ForcedInitial ics;
    double t_end;
  };
  const Case cases[] = {{free_potential(), {}, 5.0},
                        {constant_force(1.0), {}, 3.0},
                        {harmonic(1.0), {0.3, 0.2}, 1.4},
                        {mathieu(1.0, 0.2), {}, 1.5}};
  std::mt19937_64 rng(11);
  for (const Case& c : cases) {
    const AuxSolution aux = aux_for(c.pot, c.t_end, c.ics);
    std::uniform_real_distribution<double> td(0.0, c.t_end), ad(-6.0, 1.5);
    int used = 0;
    double worst = 0.0;
    while (used < 200) {
      const double t = td(rng);
      const AuxSample s = aux.sample(t);
      // draw in Airy-argument space so the samples cover the packet
      const double x = s.X + s.delta * (ad(rng) + 0.25 * s.t_prime * s.t_prime);
      if (std::abs(ai(airy_argument(x, t, p, aux))) < 1e-6) continue;
      worst = std::max(worst, std::abs(fd_velocity(x, t, p, aux) - velocity_field(x, t, p, aux)));
      ++used;
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("continuity equation holds for the analytic density and velocity") {
  const PhysicalParams p;
  // the interpolated auxiliary functions are only C1 at their nodes, so keep
  // the stencil short rather than high order; the field oscillates fast near t = 1.2
  const double h = 1e-6;
  auto dc = [h](auto f, double u) { return (f(u + h) - f(u - h)) / (2 * h); };
  for (const PotentialSpec& pot : {constant_force(0.7), harmonic(1.0), mathieu(1.0, 0.2)}) {
    const AuxSolution aux = aux_for(pot, 1.4, {0.1, -0.2});
    for (double t = 0.2; t <= 1.2; t += 0.25)
      for (double x = -3.0; x <= 1.0; x += 0.37) {
        const double drho = dc([&](double s) { return density(x, s, p, aux); }, t);
        const double dflux = dc([&](double y) { return density(y, t, p, aux) * velocity_field(y, t, p, aux); }, x);
        CHECK(std::abs(drho + dflux) <= 1e-6);
      }
  }
}
