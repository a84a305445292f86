#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "airybohm/aux_odes.hpp"
#include "airybohm/errors.hpp"

namespace airybohm {

enum class TrajectoryMethod { ClosedForm, IntegratedGuidance };

std::string to_string(TrajectoryMethod method);

/// Paths of independent particles sampled on a shared time grid.
/// paths(i, k) is the position of particle i at t_grid(k).
struct TrajectoryEnsemble {
  std::vector<double> initial_positions;
  Eigen::ArrayXd t_grid;
  Eigen::MatrixXd paths;
  TrajectoryMethod method = TrajectoryMethod::ClosedForm;

  std::size_t size() const { return initial_positions.size(); }
};

/// Failure while computing one member of an ensemble.
class ParticleError : public Error {
 public:
  ParticleError(std::size_t index, const std::string& what);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// x(t) = X(t) + (x0 - X0) delta(t)/delta0 + (B^3/2m^2) delta(t) I(t).
double closed_form_trajectory(double x0, double t, const PhysicalParams& params, const AuxSolution& aux);

/// Integrates dx/dt = velocity_field(x, t) from x(t_grid(0) = 0) = x0 and
/// returns the positions at every grid time.
Eigen::ArrayXd integrate_guidance(double x0, const Eigen::ArrayXd& t_grid, const PhysicalParams& params,
                                  const AuxSolution& aux, double tol = 1e-9);

TrajectoryEnsemble build_ensemble(const std::vector<double>& initial_positions, const Eigen::ArrayXd& t_grid,
                                  TrajectoryMethod method, const PhysicalParams& params,
                                  const AuxSolution& aux, double tol = 1e-9);

/// count equally spaced starts spanning the main Airy lobe and the first two
/// side lobes, i.e. Airy arguments from -5.5 to 0.5.
std::vector<double> default_initial_positions(const PhysicalParams& params, double X0, int count = 11);

/// Starts drawn from Ai^2 restricted to [x_lo, x_hi] (the ideal packet is not
/// normalizable, so the truncation is part of the sampler). Sorted ascending.
std::vector<double> density_weighted_positions(const PhysicalParams& params, double X0, int count, double x_lo,
                                               double x_hi, std::uint64_t seed);

}  // namespace airybohm
