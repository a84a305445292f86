#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

#include "airybohm/potential.hpp"

namespace airybohm {

/// Constants hbar, m and the packet scale B. All strictly positive.
struct PhysicalParams {
  double hbar = 1.0;
  double m = 1.0;
  double B = 1.0;

  /// Throws std::invalid_argument unless all three are positive and finite.
  void validate() const;

  /// B / hbar^(2/3): converts lengths into Airy arguments.
  double airy_scale() const { return B / std::cbrt(hbar * hbar); }
  /// B^3 / (2 m^2): the free-packet acceleration.
  double acceleration() const { return B * B * B / (2.0 * m * m); }
};

/// Initial data of the classical path X(t). Defaults to rest at the origin.
struct ForcedInitial {
  double X0 = 0.0;
  double X_dot0 = 0.0;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// Interpolated values of the auxiliary functions at one time.
struct AuxSample {
  double delta;
  double delta_dot;
  double X;
  double X_dot;
  double t_prime;
};

/// delta(t), X(t) and t'(t) on an adaptive grid starting at t = 0.
///
/// Values between nodes use cubic Hermite interpolation of stored
/// value/derivative pairs. t' is integrated node to node with an 8-point
/// Gauss-Legendre rule applied to 1/delta^2 of the interpolant. When delta
/// vanishes inside the window the grid stops short of caustic_time, closing in
/// on it with geometrically shrinking intervals.
struct AuxSolution {
  Eigen::ArrayXd t_grid;
  Eigen::ArrayXd delta;
  Eigen::ArrayXd delta_dot;
  Eigen::ArrayXd delta_ddot;
  Eigen::ArrayXd X;
  Eigen::ArrayXd X_dot;
  Eigen::ArrayXd X_ddot;
  Eigen::ArrayXd t_prime;
  std::optional<double> caustic_time;
  double delta0 = 1.0;
  double X0 = 0.0;
  TimeWindow window;

  Eigen::Index size() const { return t_grid.size(); }

  /// Throws CausticDomainError at or past the caustic, WindowError outside the solved window.
  void check_domain(double t) const;

  AuxSample sample(double t) const;
  double delta_at(double t) const;
};

/// X(t) alone; regular through caustics of delta.
struct ForcedTrack {
  Eigen::ArrayXd t_grid;
  Eigen::ArrayXd X;
  Eigen::ArrayXd X_dot;
  Eigen::ArrayXd X_ddot;

  double X_at(double t) const;
  double X_dot_at(double t) const;
};

/// Fundamental pair of delta'' + omega^2 delta = 0 with delta1 = (1, 0) and
/// delta2 = (0, 1) at t = 0, integrated through the whole window.
struct FundamentalPair {
  Eigen::ArrayXd t_grid;
  Eigen::ArrayXd delta1;
  Eigen::ArrayXd delta1_dot;
  Eigen::ArrayXd delta2;
  Eigen::ArrayXd delta2_dot;

  Eigen::ArrayXd wronskian() const { return delta1 * delta2_dot - delta1_dot * delta2; }
};

/// delta'' + omega^2(t) delta = 0 with delta(0) = 1, delta'(0) = 0. X is left at zero.
AuxSolution solve_delta(const PotentialSpec& pot, const TimeWindow& window,
                        double tol = kDefaultTolerance);

/// X'' + omega^2(t) X = F(t)/m.
ForcedTrack solve_X(const PotentialSpec& pot, const TimeWindow& window, const ForcedInitial& ics,
                    const PhysicalParams& params, double tol = kDefaultTolerance);

/// delta and X integrated jointly on one shared grid; halts at the first caustic.
AuxSolution solve_aux(const PotentialSpec& pot, const TimeWindow& window,
                      const PhysicalParams& params, const ForcedInitial& ics = {},
                      double tol = kDefaultTolerance);

FundamentalPair fundamental_solutions(const PotentialSpec& pot, const TimeWindow& window,
                                      double tol = kDefaultTolerance);

/// t'(t) = int_0^t dtau / delta^2(tau).
double reparametrized_time(const AuxSolution& aux, double t);

/// int_0^t ds delta^-2(s) int_0^s dtau delta^-2(tau), evaluated as t'(t)^2 / 2.
double nested_double_integral(const AuxSolution& aux, double t);

/// Same quantity by nested adaptive quadrature of the interpolated delta.
/// Independent of the stored t' values; used for cross-checks.
double nested_double_integral_quadrature(const AuxSolution& aux, double t, double abs_tol = 1e-11);

/// t' by adaptive quadrature of the interpolated delta, bypassing the node sums.
double reparametrized_time_quadrature(const AuxSolution& aux, double t, double abs_tol = 1e-12);

/// delta2(t) = delta(t) t'(t), the second solution with delta2(0) = 0, delta2'(0) = 1.
double second_solution(const AuxSolution& aux, double t);
double second_solution_derivative(const AuxSolution& aux, double t);

}  // namespace airybohm
