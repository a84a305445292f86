#include "airybohm/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "airybohm/ode.hpp"
#include "airybohm/specfun.hpp"
#include "airybohm/wavefunction.hpp"

namespace airybohm {

std::string to_string(TrajectoryMethod method) {
  return method == TrajectoryMethod::ClosedForm ? "closed_form" : "integrated_guidance";
}

ParticleError::ParticleError(std::size_t index, const std::string& what)
    : Error("particle " + std::to_string(index) + ": " + what), index_(index) {}

double closed_form_trajectory(double x0, double t, const PhysicalParams& params, const AuxSolution& aux) {
  const AuxSample s = aux.sample(t);
  const double nested = 0.5 * s.t_prime * s.t_prime;
  return s.X + (x0 - aux.X0) * s.delta / aux.delta0 + params.acceleration() * s.delta * nested;
}

Eigen::ArrayXd integrate_guidance(double x0, const Eigen::ArrayXd& t_grid, const PhysicalParams& params,
                                  const AuxSolution& aux, double tol) {
  if (t_grid.size() == 0) return {};
  if (t_grid(0) != 0.0) throw std::invalid_argument("trajectory time grid must start at t = 0");
  using Vec1 = Eigen::Matrix<double, 1, 1>;
  auto rhs = [&](double t, const Vec1& x) { return Vec1(velocity_field(x(0), t, params, aux)); };
  auto dp = make_dormand_prince<Vec1>(rhs, 0.0, Vec1(x0), tol);
  Eigen::ArrayXd out(t_grid.size());
  out(0) = x0;
  for (Eigen::Index k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid(k) > t_grid(k - 1))) throw std::invalid_argument("trajectory time grid must be increasing");
    aux.check_domain(t_grid(k));
    dp.advance_to(t_grid(k));
    out(k) = dp.y()(0);
  }
  return out;
}

TrajectoryEnsemble build_ensemble(const std::vector<double>& initial_positions, const Eigen::ArrayXd& t_grid,
                                  TrajectoryMethod method, const PhysicalParams& params,
                                  const AuxSolution& aux, double tol) {
  TrajectoryEnsemble ens;
  ens.initial_positions = initial_positions;
  ens.t_grid = t_grid;
  ens.method = method;
  ens.paths.resize(static_cast<Eigen::Index>(initial_positions.size()), t_grid.size());
  for (std::size_t i = 0; i < initial_positions.size(); ++i) {
    const double x0 = initial_positions[i];
    const auto row = static_cast<Eigen::Index>(i);
    try {
      if (!std::isfinite(x0)) throw std::invalid_argument("initial position is not finite");
      if (method == TrajectoryMethod::ClosedForm) {
        for (Eigen::Index k = 0; k < t_grid.size(); ++k)
          ens.paths(row, k) = k == 0 ? x0 : closed_form_trajectory(x0, t_grid(k), params, aux);
      } else {
        ens.paths.row(row) = integrate_guidance(x0, t_grid, params, aux, tol).matrix().transpose();
      }
    } catch (const std::exception& e) {
      throw ParticleError(i, e.what());
    }
  }
  return ens;
}

std::vector<double> default_initial_positions(const PhysicalParams& params, double X0, int count) {
  constexpr double lo = -5.5, hi = 0.5;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const double scale = params.airy_scale();
  for (int i = 0; i < count; ++i) {
    const double arg = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
    out.push_back(X0 + arg / scale);
  }
  return out;
}

std::vector<double> density_weighted_positions(const PhysicalParams& params, double X0, int count, double x_lo,
                                               double x_hi, std::uint64_t seed) {
  if (!(x_hi > x_lo)) throw std::invalid_argument("density-weighted sampling window is empty");
  constexpr int n = 4001;
  const double scale = params.airy_scale();
  Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(n, x_lo, x_hi);
  Eigen::ArrayXd cdf(n);
  cdf(0) = 0.0;
  double prev = std::pow(airy_ai(scale * (x(0) - X0)).ai, 2);
  for (int i = 1; i < n; ++i) {
    const double cur = std::pow(airy_ai(scale * (x(i) - X0)).ai, 2);
    cdf(i) = cdf(i - 1) + 0.5 * (prev + cur) * (x(i) - x(i - 1));
    prev = cur;
  }
  cdf /= cdf(n - 1);
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  for (int j = 0; j < count; ++j) {
    // 53-bit uniform in [0, 1) built directly from the engine output.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double* it = std::upper_bound(cdf.data(), cdf.data() + n, u);
    const int k = std::clamp(static_cast<int>(it - cdf.data()) - 1, 0, n - 2);
    const double w = (u - cdf(k)) / std::max(cdf(k + 1) - cdf(k), 1e-300);
    out.push_back(x(k) + w * (x(k + 1) - x(k)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace airybohm
