#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "airybohm/aux_odes.hpp"
#include "airybohm/potential.hpp"

namespace airybohm {

/// psi sampled on a uniform periodic grid x_j = x_min + j dx, j < n.
struct WaveField {
  Eigen::ArrayXd x_grid;
  Eigen::ArrayXcd psi;
  double t = 0.0;
  double dx = 0.0;

  Eigen::Index size() const { return x_grid.size(); }
  double norm() const { return psi.abs2().sum() * dx; }
};

struct OracleConfig {
  double apodization_a = 0.1;
  double x_min = -30.0;
  double x_max = 15.0;
  int n_points = 4096;
  double dt = 1e-3;
  double t_max = 2.0;
  /// Interval of starting positions inside the main lobe.
  double lobe_lo = -1.5;
  double lobe_hi = -0.5;
  /// Steps between stored frames.
  int frame_stride = 10;

  /// GridError on a non power-of-two size, an inverted domain or bad step settings.
  void validate() const;
  long n_steps() const;
};

struct Diagnostics {
  std::vector<std::string> warnings;
};

/// Empty field on the periodic grid of n points over [x_min, x_max).
WaveField make_field(double x_min, double x_max, int n_points);

/// Ai((B/hbar^(2/3))(x - X0)) exp(a (x - X0)) truncated to the grid, unit norm.
WaveField initialize_packet(const OracleConfig& cfg, const PhysicalParams& params, double X0 = 0.0,
                            Diagnostics* diagnostics = nullptr);

/// Throws GridError unless dx <= pi hbar / (4 max|p_local|) over the comparison
/// window, with p_local estimated from the analytic solution at the grid edges.
void check_resolution(const OracleConfig& cfg, const PhysicalParams& params, const AuxSolution& aux);

/// Strang-split propagation under V = m omega^2(t) x^2 / 2 - F(t) x. Returns the
/// input followed by every frame_stride-th state; throws StabilityError when the
/// relative norm drift exceeds 1e-8.
std::vector<WaveField> evolve_split_step(const WaveField& field, const PotentialSpec& pot,
                                         const PhysicalParams& params, double dt, long n_steps,
                                         int frame_stride = 1);

struct VelocitySamples {
  Eigen::ArrayXd v;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid;
};

/// (hbar/m) Im(conj(psi) dpsi/dx) / |psi|^2 with fourth-order periodic differences.
/// Samples with |psi|^2 < 1e-12 max|psi|^2 are flagged invalid and set to zero.
VelocitySamples numeric_velocity(const WaveField& field, const PhysicalParams& params);

/// Fraction of the norm carried by the outermost edge_fraction of cells on each side.
double boundary_mass_fraction(const WaveField& field, double edge_fraction = 0.05);

/// Position of the maximum of |psi|^2 within [lo, hi], refined by a parabola.
double peak_position(const WaveField& field, double lo, double hi);

struct ComparisonReport {
  Eigen::ArrayXd t;
  std::vector<double> starts;
  Eigen::MatrixXd numeric_paths;   // starts x frames
  Eigen::MatrixXd analytic_paths;  // starts x frames
  Eigen::ArrayXd trajectory_deviation;  // max over starts, per frame
  Eigen::ArrayXd peak;
  Eigen::ArrayXd peak_expected;
  double max_trajectory_deviation = 0.0;
  double max_peak_deviation = 0.0;
  /// Least-squares c in (peak - X) - (peak0 - X0) = c t^2; meaningful when delta = 1.
  double peak_coefficient = 0.0;
  double expected_peak_coefficient = 0.0;
  double norm_drift = 0.0;
  double max_boundary_mass = 0.0;
};

/// Integrates Bohmian trajectories through the numeric velocity field (cubic in x,
/// linear in t between frames) from n_starts points spread over the lobe region
/// and compares them with the closed-form paths.
ComparisonReport compare_with_analytic(const std::vector<WaveField>& frames, const PhysicalParams& params,
                                       const AuxSolution& aux, const OracleConfig& cfg, int n_starts = 5);

/// x,re,im rows with 17 significant digits.
void write_frame_csv(std::ostream& os, const WaveField& field);

}  // namespace airybohm
