#include "airybohm/wavefunction.hpp"

#include <cmath>

#include "airybohm/specfun.hpp"

namespace airybohm {

double airy_argument(double x, const AuxSample& s, const PhysicalParams& params) {
  const double drift = 0.5 * params.acceleration();  // B^3 / (4 m^2)
  return params.airy_scale() * ((x - s.X) / s.delta - drift * s.t_prime * s.t_prime);
}

double density(double x, const AuxSample& s, const PhysicalParams& params) {
  const double ai = airy_ai(airy_argument(x, s, params)).ai;
  return ai * ai / s.delta;
}

double velocity_field(double x, const AuxSample& s, const PhysicalParams& params) {
  return s.X_dot + (x - s.X) * s.delta_dot / s.delta + params.acceleration() * s.t_prime / s.delta;
}

double airy_argument(double x, double t, const PhysicalParams& params, const AuxSolution& aux) {
  return airy_argument(x, aux.sample(t), params);
}

double density(double x, double t, const PhysicalParams& params, const AuxSolution& aux) {
  return density(x, aux.sample(t), params);
}

double velocity_field(double x, double t, const PhysicalParams& params, const AuxSolution& aux) {
  return velocity_field(x, aux.sample(t), params);
}

WavePoint wave_point(double x, double t, const PhysicalParams& params, const AuxSolution& aux) {
  const AuxSample s = aux.sample(t);
  const double arg = airy_argument(x, s, params);
  const double ai = airy_ai(arg).ai;
  return {ai * ai / s.delta, params.m * velocity_field(x, s, params), arg};
}

std::complex<double> complex_psi(double x, double t, const PhysicalParams& params, const AuxSolution& aux,
                                 double x_ref) {
  const AuxSample s = aux.sample(t);
  const double modulus = airy_ai(airy_argument(x, s, params)).ai / std::sqrt(s.delta);
  // v(x) is affine in x, so its integral from x_ref is exact.
  const double uniform = s.X_dot + params.acceleration() * s.t_prime / s.delta;
  const double shear = s.delta_dot / s.delta;
  const double dx = x - s.X, dref = x_ref - s.X;
  const double phase = params.m / params.hbar * (uniform * (x - x_ref) + 0.5 * shear * (dx * dx - dref * dref));
  return std::polar(1.0, phase) * modulus;
}

}  // namespace airybohm
