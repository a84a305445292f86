#pragma once

#include <airybohm/aux_odes.hpp>
#include <airybohm/potential.hpp>

#include <cmath>
#include <numbers>

namespace support {

using namespace airybohm;

inline PotentialSpec free_potential() { return {}; }

inline PotentialSpec harmonic(double w2 = 1.0) {
  PotentialSpec p;
  p.omega_sq = ConstantTerm{w2};
  return p;
}

inline PotentialSpec constant_force(double f0) {
  PotentialSpec p;
  p.force = ConstantTerm{f0};
  return p;
}

inline PotentialSpec mathieu(double a, double q, double scale = 1.0) {
  PotentialSpec p;
  p.omega_sq = MathieuTerm{a, q, scale};
  return p;
}

inline AuxSolution aux_for(const PotentialSpec& p, double t_end, const ForcedInitial& ics = {},
                           const PhysicalParams& params = {}) {
  return solve_aux(p, TimeWindow{0.0, t_end}, params, ics);
}

}  // namespace support
