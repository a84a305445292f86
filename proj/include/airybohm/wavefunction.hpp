#pragma once

#include <Eigen/Core>

#include <complex>

#include "airybohm/aux_odes.hpp"

namespace airybohm {

struct WavePoint {
  double amplitude_sq;    // |psi|^2
  double phase_gradient;  // d phi / dx (momentum units)
  double airy_argument;
};

// Overloads taking an AuxSample avoid re-interpolating the auxiliary functions
// when many positions are evaluated at one time.

double airy_argument(double x, const AuxSample& s, const PhysicalParams& params);
double density(double x, const AuxSample& s, const PhysicalParams& params);
double velocity_field(double x, const AuxSample& s, const PhysicalParams& params);

/// Scaled Airy argument (B/hbar^(2/3)) [(x - X)/delta - (B^3/4m^2) t'^2].
double airy_argument(double x, double t, const PhysicalParams& params, const AuxSolution& aux);

/// |psi|^2 = Ai(argument)^2 / delta.
double density(double x, double t, const PhysicalParams& params, const AuxSolution& aux);

/// Bohmian velocity (1/m) d phi/dx = X' + (x - X) delta'/delta + B^3 t' / (2 m^2 delta).
double velocity_field(double x, double t, const PhysicalParams& params, const AuxSolution& aux);

WavePoint wave_point(double x, double t, const PhysicalParams& params, const AuxSolution& aux);

/// psi(x, t) with modulus Ai(argument)/sqrt(delta). The phase is the integral of
/// (m/hbar) v(x) from x_ref, so the phase at x_ref is zero at every t (gauge choice:
/// the x-independent part of the phase is dropped).
std::complex<double> complex_psi(double x, double t, const PhysicalParams& params, const AuxSolution& aux,
                                 double x_ref = 0.0);

template <typename Derived>
Eigen::ArrayXd density(const Eigen::ArrayBase<Derived>& x, double t, const PhysicalParams& params,
                       const AuxSolution& aux) {
  const AuxSample s = aux.sample(t);
  Eigen::ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = density(static_cast<double>(x(i)), s, params);
  return out;
}

template <typename Derived>
Eigen::ArrayXd velocity_field(const Eigen::ArrayBase<Derived>& x, double t, const PhysicalParams& params,
                              const AuxSolution& aux) {
  const AuxSample s = aux.sample(t);
  Eigen::ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = velocity_field(static_cast<double>(x(i)), s, params);
  return out;
}

}  // namespace airybohm
