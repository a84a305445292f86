#include "airybohm/aux_odes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "airybohm/errors.hpp"
#include "airybohm/ode.hpp"
#include "airybohm/quadrature.hpp"

namespace airybohm {

CausticDomainError::CausticDomainError(double t, double caustic_time)
    : Error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "t = " << t << " is at or beyond the caustic at t = " << caustic_time
           << " where delta(t) vanishes";
        return os.str();
      }()),
      t_(t),
      caustic_time_(caustic_time) {}

void PhysicalParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0; };
  if (!ok(hbar) || !ok(m) || !ok(B))
    throw std::invalid_argument("physical parameters hbar, m, B must be positive and finite");
}

namespace {

using Vec2 = Eigen::Matrix<double, 2, 1>;
using Vec4 = Eigen::Matrix<double, 4, 1>;

// Number of geometrically shrinking intervals placed between the last regular
// node and a caustic.
constexpr int kApproachNodes = 26;

void require_window(const TimeWindow& w) {
  if (w.start != 0.0) throw std::invalid_argument("time window must start at t = 0");
  if (!(w.end > 0.0) || !std::isfinite(w.end))
    throw std::invalid_argument("time window end must be positive and finite");
}

// Integration stops exactly at kinks of tabulated coefficients.
class StopList {
 public:
  StopList(const PotentialSpec& pot, const TimeWindow& w) : stops_(pot.breakpoints(w)), end_(w.end) {}
  double next(double t) const {
    auto it = std::upper_bound(stops_.begin(), stops_.end(), t);
    return it == stops_.end() ? end_ : *it;
  }

 private:
  std::vector<double> stops_;
  double end_;
};

double step_cap(const PotentialSpec& pot, const TimeWindow& w) {
  return 0.01 / std::max(1.0, std::sqrt(pot.max_abs_omega_sq(w)));
}

Eigen::Index locate(const Eigen::ArrayXd& grid, double t) {
  const double* begin = grid.data();
  const double* end = begin + grid.size();
  Eigen::Index k = std::upper_bound(begin, end, t) - begin - 1;
  return std::clamp<Eigen::Index>(k, 0, grid.size() - 2);
}

Eigen::ArrayXd to_array(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Recorder {
  std::vector<double> t, y0, y1, y2, y3, d1, d3;

  void push(double time, const Vec4& y, const Vec4& dy) {
    t.push_back(time);
    y0.push_back(y(0));
    y1.push_back(y(1));
    y2.push_back(y(2));
    y3.push_back(y(3));
    d1.push_back(dy(1));
    d3.push_back(dy(3));
  }
};

double interp_delta(const AuxSolution& aux, Eigen::Index k, double t) {
  return hermite(aux.t_grid(k), aux.t_grid(k + 1), aux.delta(k), aux.delta(k + 1), aux.delta_dot(k),
                 aux.delta_dot(k + 1), t);
}

double inverse_delta_sq(const AuxSolution& aux, Eigen::Index k, double t) {
  const double d = interp_delta(aux, k, t);
  return 1.0 / (d * d);
}

AuxSolution integrate_aux(const PotentialSpec& pot, const TimeWindow& window, double inv_m,
                          const ForcedInitial& ics, double tol, bool with_force) {
  require_window(window);
  pot.require_covers(window);
  auto rhs = [&pot, inv_m, with_force](double t, const Vec4& y) {
    const double w2 = pot.omega_sq_at(t);
    const double f = with_force ? pot.force_at(t) * inv_m : 0.0;
    return Vec4(y(1), -w2 * y(0), y(3), f - w2 * y(2));
  };
  const Vec4 y0(1.0, 0.0, ics.X0, ics.X_dot0);
  const StopList stops(pot, window);
  auto dp = make_dormand_prince<Vec4>(rhs, 0.0, y0, tol, step_cap(pot, window));

  Recorder rec;
  rec.push(0.0, y0, dp.dydt());
  std::optional<double> caustic;
  while (dp.t() < window.end) {
    const auto before = dp;
    dp.step(stops.next(dp.t()));
    if (dp.y()(0) > 0.0) {
      rec.push(dp.t(), dp.y(), dp.dydt());
      continue;
    }
    // delta changed sign inside the last step: refine the zero by re-stepping
    // from the start of the step (Illinois false position).
    auto delta_after = [&before](double tau) { return before.trial(tau)(0); };
    double lo = 0.0, hi = dp.t() - before.t();
    double f_lo = before.y()(0), f_hi = dp.y()(0);
    int side = 0;
    for (int it = 0; it < 200 && hi - lo > 4e-16 * dp.t(); ++it) {
      double mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
      const double f_mid = delta_after(mid);
      if (f_mid > 0.0) {
        lo = mid;
        f_lo = f_mid;
        if (side == -1) f_hi *= 0.5;
        side = -1;
      } else {
        hi = mid;
        f_hi = f_mid;
        if (side == 1) f_lo *= 0.5;
        side = 1;
      }
    }
    const double gap = lo;
    caustic = before.t() + gap;
    double scale = 0.5;
    for (int j = 0; j < kApproachNodes; ++j, scale *= 0.5) {
      const double tau = gap * (1.0 - scale);
      const Vec4 y = before.trial(tau);
      if (!(y(0) > 0.0)) break;
      rec.push(before.t() + tau, y, rhs(before.t() + tau, y));
    }
    break;
  }

  AuxSolution aux;
  aux.t_grid = to_array(rec.t);
  aux.delta = to_array(rec.y0);
  aux.delta_dot = to_array(rec.y1);
  aux.delta_ddot = to_array(rec.d1);
  aux.X = to_array(rec.y2);
  aux.X_dot = to_array(rec.y3);
  aux.X_ddot = to_array(rec.d3);
  aux.caustic_time = caustic;
  aux.delta0 = 1.0;
  aux.X0 = ics.X0;
  aux.window = window;

  aux.t_prime = Eigen::ArrayXd::Zero(aux.size());
  for (Eigen::Index k = 0; k + 1 < aux.size(); ++k) {
    aux.t_prime(k + 1) =
        aux.t_prime(k) + gauss_legendre8([&](double s) { return inverse_delta_sq(aux, k, s); },
                                         aux.t_grid(k), aux.t_grid(k + 1));
  }
  return aux;
}

}  // namespace

void AuxSolution::check_domain(double t) const {
  if (!(t >= 0.0)) {
    std::ostringstream os;
    os << "t = " << t << " precedes the start of the solved window";
    throw WindowError(os.str());
  }
  if (caustic_time && t >= *caustic_time) throw CausticDomainError(t, *caustic_time);
  const double last = t_grid(t_grid.size() - 1);
  if (t > last) {
    if (caustic_time) throw CausticDomainError(t, *caustic_time);
    if (t > last + 1e-12 * std::max(1.0, last)) {
      std::ostringstream os;
      os << "t = " << t << " is beyond the solved window end " << last;
      throw WindowError(os.str());
    }
  }
}

AuxSample AuxSolution::sample(double t) const {
  check_domain(t);
  const Eigen::Index k = locate(t_grid, t);
  const double t0 = t_grid(k), t1 = t_grid(k + 1);
  AuxSample s;
  s.delta = hermite(t0, t1, delta(k), delta(k + 1), delta_dot(k), delta_dot(k + 1), t);
  s.delta_dot = hermite(t0, t1, delta_dot(k), delta_dot(k + 1), delta_ddot(k), delta_ddot(k + 1), t);
  s.X = hermite(t0, t1, X(k), X(k + 1), X_dot(k), X_dot(k + 1), t);
  s.X_dot = hermite(t0, t1, X_dot(k), X_dot(k + 1), X_ddot(k), X_ddot(k + 1), t);
  s.t_prime = t_prime(k) + (t > t0 ? gauss_legendre8([&](double u) { return inverse_delta_sq(*this, k, u); }, t0, t)
                                   : 0.0);
  return s;
}

double AuxSolution::delta_at(double t) const {
  check_domain(t);
  return interp_delta(*this, locate(t_grid, t), t);
}

double ForcedTrack::X_at(double t) const {
  if (t < t_grid(0) || t > t_grid(t_grid.size() - 1)) throw WindowError("X(t) requested outside the solved window");
  const Eigen::Index k = locate(t_grid, t);
  return hermite(t_grid(k), t_grid(k + 1), X(k), X(k + 1), X_dot(k), X_dot(k + 1), t);
}

double ForcedTrack::X_dot_at(double t) const {
  if (t < t_grid(0) || t > t_grid(t_grid.size() - 1)) throw WindowError("X'(t) requested outside the solved window");
  const Eigen::Index k = locate(t_grid, t);
  return hermite(t_grid(k), t_grid(k + 1), X_dot(k), X_dot(k + 1), X_ddot(k), X_ddot(k + 1), t);
}

AuxSolution solve_delta(const PotentialSpec& pot, const TimeWindow& window, double tol) {
  return integrate_aux(pot, window, 1.0, ForcedInitial{}, tol, false);
}

AuxSolution solve_aux(const PotentialSpec& pot, const TimeWindow& window, const PhysicalParams& params,
                      const ForcedInitial& ics, double tol) {
  params.validate();
  return integrate_aux(pot, window, 1.0 / params.m, ics, tol, true);
}

ForcedTrack solve_X(const PotentialSpec& pot, const TimeWindow& window, const ForcedInitial& ics,
                    const PhysicalParams& params, double tol) {
  params.validate();
  require_window(window);
  pot.require_covers(window);
  const double inv_m = 1.0 / params.m;
  auto rhs = [&pot, inv_m](double t, const Vec2& y) {
    return Vec2(y(1), pot.force_at(t) * inv_m - pot.omega_sq_at(t) * y(0));
  };
  const StopList stops(pot, window);
  auto dp = make_dormand_prince<Vec2>(rhs, 0.0, Vec2(ics.X0, ics.X_dot0), tol, step_cap(pot, window));
  std::vector<double> t{0.0}, x{ics.X0}, xd{ics.X_dot0}, xdd{dp.dydt()(1)};
  while (dp.t() < window.end) {
    dp.step(stops.next(dp.t()));
    t.push_back(dp.t());
    x.push_back(dp.y()(0));
    xd.push_back(dp.y()(1));
    xdd.push_back(dp.dydt()(1));
  }
  return {to_array(t), to_array(x), to_array(xd), to_array(xdd)};
}

FundamentalPair fundamental_solutions(const PotentialSpec& pot, const TimeWindow& window, double tol) {
  require_window(window);
  pot.require_covers(window);
  auto rhs = [&pot](double t, const Vec4& y) {
    const double w2 = pot.omega_sq_at(t);
    return Vec4(y(1), -w2 * y(0), y(3), -w2 * y(2));
  };
  const StopList stops(pot, window);
  auto dp = make_dormand_prince<Vec4>(rhs, 0.0, Vec4(1.0, 0.0, 0.0, 1.0), tol, step_cap(pot, window));
  Recorder rec;
  rec.push(0.0, dp.y(), dp.dydt());
  while (dp.t() < window.end) {
    dp.step(stops.next(dp.t()));
    rec.push(dp.t(), dp.y(), dp.dydt());
  }
  return {to_array(rec.t), to_array(rec.y0), to_array(rec.y1), to_array(rec.y2), to_array(rec.y3)};
}

double reparametrized_time(const AuxSolution& aux, double t) { return aux.sample(t).t_prime; }

double nested_double_integral(const AuxSolution& aux, double t) {
  const double tp = reparametrized_time(aux, t);
  return 0.5 * tp * tp;
}

double reparametrized_time_quadrature(const AuxSolution& aux, double t, double abs_tol) {
  aux.check_domain(t);
  if (t <= 0.0) return 0.0;
  const Eigen::Index last = locate(aux.t_grid, t);
  double sum = 0.0;
  for (Eigen::Index k = 0; k <= last; ++k) {
    const double a = aux.t_grid(k), b = k == last ? t : aux.t_grid(k + 1);
    sum += integrate_adaptive([&](double s) { return inverse_delta_sq(aux, k, s); }, a, b, abs_tol * (b - a) / t);
  }
  return sum;
}

double nested_double_integral_quadrature(const AuxSolution& aux, double t, double abs_tol) {
  aux.check_domain(t);
  if (t <= 0.0) return 0.0;
  // The interpolant is only C1 at the nodes, so every rule stays inside one interval.
  const Eigen::Index last = locate(aux.t_grid, t);
  double inner_base = 0.0, sum = 0.0;
  for (Eigen::Index k = 0; k <= last; ++k) {
    const double a = aux.t_grid(k), b = k == last ? t : aux.t_grid(k + 1);
    const double tol = abs_tol * (b - a) / t;
    auto inv_sq = [&](double s) { return inverse_delta_sq(aux, k, s); };
    auto outer = [&](double s) { return inv_sq(s) * (inner_base + integrate_adaptive(inv_sq, a, s, 0.1 * tol)); };
    sum += integrate_adaptive(outer, a, b, tol);
    inner_base += integrate_adaptive(inv_sq, a, b, 0.1 * tol);
  }
  return sum;
}

double second_solution(const AuxSolution& aux, double t) {
  const AuxSample s = aux.sample(t);
  return s.delta * s.t_prime;
}

double second_solution_derivative(const AuxSolution& aux, double t) {
  const AuxSample s = aux.sample(t);
  return s.delta_dot * s.t_prime + 1.0 / s.delta;
}

}  // namespace airybohm
