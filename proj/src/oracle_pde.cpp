#include "airybohm/oracle_pde.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "airybohm/errors.hpp"
#include "airybohm/specfun.hpp"
#include "airybohm/trajectories.hpp"
#include "airybohm/wavefunction.hpp"

namespace airybohm {

namespace {

bool power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

bool time_independent(const PotentialSpec& pot) {
  auto simple = [](const auto& term) {
    using T = std::decay_t<decltype(term)>;
    return std::is_same_v<T, ZeroTerm> || std::is_same_v<T, ConstantTerm>;
  };
  return std::visit(simple, pot.omega_sq) && std::visit(simple, pot.force);
}

Eigen::ArrayXcd potential_half_step(const Eigen::ArrayXd& x, const PotentialSpec& pot,
                                    const PhysicalParams& params, double t, double dt) {
  const double w2 = pot.omega_sq_at(t), f = pot.force_at(t);
  const Eigen::ArrayXd v = 0.5 * params.m * w2 * x.square() - f * x;
  const Eigen::ArrayXd angle = -0.5 * dt / params.hbar * v;
  return angle.cos() + std::complex<double>(0, 1) * angle.sin();
}

// Cubic Lagrange interpolation of uniformly spaced samples.
double interpolate(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double dx, double at) {
  const Eigen::Index n = x.size();
  Eigen::Index j = static_cast<Eigen::Index>(std::floor((at - x(0)) / dx));
  j = std::clamp<Eigen::Index>(j, 1, n - 3);
  const double s = (at - x(j)) / dx;
  const double ym = y(j - 1), y0 = y(j), y1 = y(j + 1), y2 = y(j + 2);
  return -s * (s - 1) * (s - 2) / 6 * ym + (s + 1) * (s - 1) * (s - 2) / 2 * y0 -
         (s + 1) * s * (s - 2) / 2 * y1 + (s + 1) * s * (s - 1) / 6 * y2;
}

}  // namespace

void OracleConfig::validate() const {
  std::ostringstream os;
  if (!power_of_two(n_points)) {
    os << "n_points = " << n_points << " is not a power of two";
    throw GridError(os.str());
  }
  if (!(x_max > x_min)) {
    os << "inverted spatial domain [" << x_min << ", " << x_max << "]";
    throw GridError(os.str());
  }
  if (!(dt > 0) || !(t_max >= 0) || frame_stride < 1) throw GridError("dt, t_max and frame_stride must be positive");
  if (!(lobe_hi >= lobe_lo) || lobe_lo < x_min || lobe_hi > x_max)
    throw GridError("lobe region must lie inside the spatial domain");
}

long OracleConfig::n_steps() const { return std::lround(t_max / dt); }

WaveField make_field(double x_min, double x_max, int n_points) {
  if (!power_of_two(n_points)) throw GridError("n_points must be a power of two");
  if (!(x_max > x_min)) throw GridError("inverted spatial domain");
  WaveField f;
  f.dx = (x_max - x_min) / n_points;
  f.x_grid = x_min + f.dx * Eigen::ArrayXd::LinSpaced(n_points, 0, n_points - 1);
  f.psi = Eigen::ArrayXcd::Zero(n_points);
  return f;
}

WaveField initialize_packet(const OracleConfig& cfg, const PhysicalParams& params, double X0,
                            Diagnostics* diagnostics) {
  cfg.validate();
  params.validate();
  if (cfg.apodization_a <= 0 && diagnostics)
    diagnostics->warnings.push_back(
        "apodization a <= 0: the Airy tail is non-normalizable and only truncated by the grid");
  WaveField f = make_field(cfg.x_min, cfg.x_max, cfg.n_points);
  const double scale = params.airy_scale();
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    const double u = f.x_grid(j) - X0;
    f.psi(j) = airy_ai(scale * u).ai * std::exp(cfg.apodization_a * u);
  }
  f.psi /= std::sqrt(f.norm());
  return f;
}

void check_resolution(const OracleConfig& cfg, const PhysicalParams& params, const AuxSolution& aux) {
  cfg.validate();
  double p_max = 0.0;
  constexpr int n_times = 20;
  for (int i = 0; i <= n_times; ++i) {
    const double t = cfg.t_max * i / n_times;
    const AuxSample s = aux.sample(t);
    for (double x : {cfg.x_min, cfg.x_max}) {
      const double arg = airy_argument(x, s, params);
      // local wavenumber of Ai(arg) in the oscillatory region, plus the phase gradient
      const double k_airy = params.airy_scale() / s.delta * std::sqrt(std::max(0.0, -arg));
      p_max = std::max(p_max, params.hbar * k_airy + params.m * std::abs(velocity_field(x, s, params)));
    }
  }
  const double dx = (cfg.x_max - cfg.x_min) / cfg.n_points;
  const double limit = std::numbers::pi * params.hbar / (4.0 * std::max(p_max, 1e-300));
  if (dx > limit) {
    std::ostringstream os;
    os << "grid spacing " << dx << " does not resolve local momentum " << p_max << " (need dx <= " << limit << ")";
    throw GridError(os.str());
  }
}

std::vector<WaveField> evolve_split_step(const WaveField& field, const PotentialSpec& pot,
                                         const PhysicalParams& params, double dt, long n_steps,
                                         int frame_stride) {
  if (!power_of_two(field.size())) throw GridError("field size must be a power of two");
  if (!(dt > 0)) throw GridError("time step must be positive");
  frame_stride = std::max(frame_stride, 1);
  std::vector<WaveField> frames{field};
  if (n_steps <= 0) return frames;

  const Eigen::Index n = field.size();
  const double length = n * field.dx;
  Eigen::ArrayXd k(n);
  for (Eigen::Index j = 0; j < n; ++j)
    k(j) = 2.0 * std::numbers::pi / length * static_cast<double>(j < n / 2 ? j : j - n);
  const Eigen::ArrayXd kinetic_angle = -params.hbar * dt / (2.0 * params.m) * k.square();
  const Eigen::ArrayXcd kinetic = kinetic_angle.cos() + std::complex<double>(0, 1) * kinetic_angle.sin();

  const bool static_potential = time_independent(pot);
  const bool no_potential = static_potential && pot.omega_sq_at(0) == 0.0 && pot.force_at(0) == 0.0;
  Eigen::ArrayXcd half = static_potential ? potential_half_step(field.x_grid, pot, params, 0.0, dt)
                                          : Eigen::ArrayXcd();

  Eigen::FFT<double> fft;
  Eigen::VectorXcd psi = field.psi.matrix();
  Eigen::VectorXcd spectrum(n);
  const double norm0 = field.norm();
  double t = field.t;
  for (long step = 1; step <= n_steps; ++step) {
    if (!no_potential) {
      if (!static_potential) half = potential_half_step(field.x_grid, pot, params, t, dt);
      psi.array() *= half;
    }
    fft.fwd(spectrum, psi);
    spectrum.array() *= kinetic;
    fft.inv(psi, spectrum);
    t = field.t + step * dt;
    if (!no_potential) {
      if (!static_potential) half = potential_half_step(field.x_grid, pot, params, t, dt);
      psi.array() *= half;
    }
    if (step % frame_stride == 0 || step == n_steps) {
      WaveField frame{field.x_grid, psi.array(), t, field.dx};
      const double drift = std::abs(frame.norm() - norm0) / norm0;
      if (!(drift <= 1e-8)) {
        std::ostringstream os;
        os << "norm drift " << drift << " exceeds 1e-8 at t = " << t;
        throw StabilityError(os.str());
      }
      frames.push_back(std::move(frame));
    }
  }
  return frames;
}

VelocitySamples numeric_velocity(const WaveField& field, const PhysicalParams& params) {
  const Eigen::Index n = field.size();
  VelocitySamples out{Eigen::ArrayXd::Zero(n), Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false)};
  const Eigen::ArrayXd rho = field.psi.abs2();
  const double threshold = 1e-12 * rho.maxCoeff();
  const auto& psi = field.psi;
  auto at = [&](Eigen::Index j) { return psi((j + n) % n); };
  for (Eigen::Index j = 0; j < n; ++j) {
    if (rho(j) < threshold) continue;
    const std::complex<double> d =
        (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) / (12.0 * field.dx);
    out.v(j) = params.hbar / params.m * std::imag(std::conj(psi(j)) * d) / rho(j);
    out.valid(j) = true;
  }
  return out;
}

double boundary_mass_fraction(const WaveField& field, double edge_fraction) {
  const Eigen::Index n = field.size();
  const Eigen::Index edge = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(edge_fraction * n));
  const Eigen::ArrayXd rho = field.psi.abs2();
  return (rho.head(edge).sum() + rho.tail(edge).sum()) / rho.sum();
}

double peak_position(const WaveField& field, double lo, double hi) {
  const Eigen::ArrayXd rho = field.psi.abs2();
  Eigen::Index best = -1;
  for (Eigen::Index j = 1; j + 1 < field.size(); ++j) {
    if (field.x_grid(j) < lo || field.x_grid(j) > hi) continue;
    if (best < 0 || rho(j) > rho(best)) best = j;
  }
  if (best < 0) throw GridError("peak search interval contains no grid points");
  const double ym = rho(best - 1), y0 = rho(best), yp = rho(best + 1);
  const double denom = ym - 2 * y0 + yp;
  const double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  return field.x_grid(best) + std::clamp(shift, -0.5, 0.5) * field.dx;
}

ComparisonReport compare_with_analytic(const std::vector<WaveField>& frames, const PhysicalParams& params,
                                       const AuxSolution& aux, const OracleConfig& cfg, int n_starts) {
  if (frames.empty()) throw WindowError("no frames to compare");
  const double t_last = frames.back().t;
  if (cfg.t_max > t_last + 1e-9 * std::max(1.0, t_last)) {
    std::ostringstream os;
    os << "comparison window ends at " << cfg.t_max << " but frames stop at " << t_last;
    throw WindowError(os.str());
  }
  std::size_t n_frames = 0;
  while (n_frames < frames.size() && frames[n_frames].t <= cfg.t_max + 1e-12) ++n_frames;

  ComparisonReport rep;
  rep.t.resize(static_cast<Eigen::Index>(n_frames));
  for (std::size_t f = 0; f < n_frames; ++f) rep.t(static_cast<Eigen::Index>(f)) = frames[f].t;

  std::vector<Eigen::ArrayXd> velocity;
  velocity.reserve(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) velocity.push_back(numeric_velocity(frames[f], params).v);

  for (int i = 0; i < n_starts; ++i)
    rep.starts.push_back(n_starts == 1 ? 0.5 * (cfg.lobe_lo + cfg.lobe_hi)
                                       : cfg.lobe_lo + (cfg.lobe_hi - cfg.lobe_lo) * i / (n_starts - 1));

  const auto cols = static_cast<Eigen::Index>(n_frames);
  rep.numeric_paths.resize(n_starts, cols);
  rep.analytic_paths.resize(n_starts, cols);
  const Eigen::ArrayXd& xg = frames.front().x_grid;
  const double dx = frames.front().dx;
  for (int i = 0; i < n_starts; ++i) {
    double x = rep.starts[static_cast<std::size_t>(i)];
    rep.numeric_paths(i, 0) = x;
    rep.analytic_paths(i, 0) = x;
    for (std::size_t f = 0; f + 1 < n_frames; ++f) {
      const double h = frames[f + 1].t - frames[f].t;
      auto v0 = [&](double at) { return interpolate(xg, velocity[f], dx, at); };
      auto v1 = [&](double at) { return interpolate(xg, velocity[f + 1], dx, at); };
      auto vm = [&](double at) { return 0.5 * (v0(at) + v1(at)); };
      const double k1 = v0(x);
      const double k2 = vm(x + 0.5 * h * k1);
      const double k3 = vm(x + 0.5 * h * k2);
      const double k4 = v1(x + h * k3);
      x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      const auto c = static_cast<Eigen::Index>(f + 1);
      rep.numeric_paths(i, c) = x;
      rep.analytic_paths(i, c) = closed_form_trajectory(rep.starts[static_cast<std::size_t>(i)], rep.t(c), params, aux);
    }
  }
  rep.trajectory_deviation = (rep.numeric_paths - rep.analytic_paths).cwiseAbs().colwise().maxCoeff().transpose().array();
  rep.max_trajectory_deviation = rep.trajectory_deviation.maxCoeff();

  // Lobe peak: start from the global maximum inside the lobe region, then follow it
  // frame by frame within half a lobe width.
  rep.peak.resize(cols);
  rep.peak_expected.resize(cols);
  const double half_width = 0.5 / params.airy_scale();
  double prev = peak_position(frames.front(), cfg.lobe_lo - half_width, cfg.lobe_hi + half_width);
  const double peak0 = prev;
  double num = 0.0, den = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& fr = frames[static_cast<std::size_t>(c)];
    const AuxSample s = aux.sample(fr.t);
    const double expected = closed_form_trajectory(peak0, fr.t, params, aux);
    prev = peak_position(fr, prev - half_width, prev + half_width);
    rep.peak(c) = prev;
    rep.peak_expected(c) = expected;
    const double t2 = fr.t * fr.t;
    num += ((prev - s.X) - (peak0 - aux.X0)) * t2;
    den += t2 * t2;
  }
  rep.max_peak_deviation = (rep.peak - rep.peak_expected).abs().maxCoeff();
  rep.peak_coefficient = den > 0 ? num / den : 0.0;
  rep.expected_peak_coefficient = 0.5 * params.acceleration();

  const double norm0 = frames.front().norm();
  for (std::size_t f = 0; f < n_frames; ++f) {
    rep.norm_drift = std::max(rep.norm_drift, std::abs(frames[f].norm() - norm0) / norm0);
    rep.max_boundary_mass = std::max(rep.max_boundary_mass, boundary_mass_fraction(frames[f]));
  }
  return rep;
}

void write_frame_csv(std::ostream& os, const WaveField& field) {
  char buf[96];
  os << "x,re,im\n";
  for (Eigen::Index j = 0; j < field.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", field.x_grid(j), field.psi(j).real(), field.psi(j).imag());
    os << buf;
  }
}

}  // namespace airybohm
