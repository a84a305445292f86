#pragma once

#include <variant>
#include <vector>

namespace airybohm {

/// Closed time interval [start, end]. The analytic construction requires start = 0.
struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

struct ZeroTerm {};

struct ConstantTerm {
  double value = 0.0;
};

/// omega^2(t) = a - 2 q cos(2 t / scale)
struct MathieuTerm {
  double a = 0.0;
  double q = 0.0;
  double scale = 1.0;
};

/// Piecewise-linear samples; times must be strictly increasing.
struct TabulatedTerm {
  std::vector<double> t;
  std::vector<double> value;
};

using OmegaSqTerm = std::variant<ZeroTerm, ConstantTerm, MathieuTerm, TabulatedTerm>;
using ForceTerm = std::variant<ZeroTerm, ConstantTerm, TabulatedTerm>;

/// Time-dependent quadratic potential V(x, t) = m omega^2(t) x^2 / 2 - F(t) x.
struct PotentialSpec {
  OmegaSqTerm omega_sq = ZeroTerm{};
  ForceTerm force = ZeroTerm{};

  double omega_sq_at(double t) const;
  double force_at(double t) const;

  /// Throws TabulatedWindowError when tabulated samples are malformed or do not cover w.
  void require_covers(const TimeWindow& w) const;

  /// Upper bound of |omega^2| over the window, by dense sampling.
  double max_abs_omega_sq(const TimeWindow& w) const;

  /// Tabulated sample times strictly inside w, where the coefficients have kinks.
  std::vector<double> breakpoints(const TimeWindow& w) const;
  bool force_free() const { return std::holds_alternative<ZeroTerm>(force); }
};

}  // namespace airybohm
