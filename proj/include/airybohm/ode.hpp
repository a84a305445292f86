#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "airybohm/errors.hpp"

namespace airybohm {

/// Adaptive Dormand-Prince 5(4) integrator with FSAL and local extrapolation.
///
/// State is any fixed or dynamic Eigen column vector. The rhs is called as
/// rhs(t, y) and returns dy/dt. Local error is controlled in the max norm
/// |err_i| <= tol * (1 + max(|y_i|, |y_new_i|)).
template <typename State, typename Rhs>
class DormandPrince {
 public:
  using Scalar = typename State::Scalar;

  DormandPrince(Rhs rhs, Scalar t0, const State& y0, Scalar tol,
                Scalar h_max = std::numeric_limits<Scalar>::infinity())
      : rhs_(std::move(rhs)), t_(t0), y_(y0), tol_(tol), h_max_(h_max) {
    if (!(tol > 0)) throw ToleranceError("tolerance must be positive");
    dydt_ = rhs_(t_, y_);
    h_ = std::min<Scalar>(initial_step(), h_max_);
  }

  Scalar t() const { return t_; }
  const State& y() const { return y_; }
  const State& dydt() const { return dydt_; }
  long steps() const { return steps_; }

  /// Take one accepted step, never passing t_limit. Returns the step used.
  Scalar step(Scalar t_limit) {
    const Scalar min_h = 64 * std::numeric_limits<Scalar>::epsilon() * std::max<Scalar>(1, std::abs(t_));
    for (int attempt = 0; attempt < 200; ++attempt) {
      Scalar h = std::min(h_, t_limit - t_);
      const bool clipped = h < h_;
      State y_new, k7;
      const Scalar err = trial_impl(h, y_new, k7);
      if (err <= 1) {
        t_ = clipped ? t_limit : t_ + h;
        y_ = y_new;
        dydt_ = k7;
        ++steps_;
        const Scalar factor = err == 0 ? Scalar(5) : std::clamp<Scalar>(Scalar(0.9) * std::pow(err, Scalar(-0.2)), 0.2, 5);
        if (!clipped || factor < 1) h_ = std::min(h_max_, h * factor);
        return h;
      }
      h_ = h * std::clamp<Scalar>(Scalar(0.9) * std::pow(err, Scalar(-0.2)), 0.1, 0.9);
      if (h_ < min_h) {
        std::ostringstream os;
        os << "step size underflow at t = " << t_ << " (tol = " << tol_ << ")";
        throw ToleranceError(os.str());
      }
    }
    throw ToleranceError("step rejected too many times");
  }

  /// Advance exactly to t_target (t_target >= t()).
  void advance_to(Scalar t_target, long max_steps = 10'000'000) {
    while (t_ < t_target) {
      step(t_target);
      if (steps_ > max_steps) throw ToleranceError("maximum number of steps exceeded");
    }
  }

  /// Single unchecked step of size h from the current point, used for root
  /// refinement inside an already accepted step.
  State trial(Scalar h) const {
    State y_new, k7;
    trial_impl(h, y_new, k7);
    return y_new;
  }

 private:
  Scalar initial_step() const {
    const Scalar scale = 1 + y_.cwiseAbs().maxCoeff();
    const Scalar slope = dydt_.cwiseAbs().maxCoeff();
    Scalar h = slope > 0 ? Scalar(0.01) * scale / slope : Scalar(0.01);
    return std::clamp<Scalar>(h, 1e-6, 0.1);
  }

  Scalar trial_impl(Scalar h, State& y_new, State& k7) const {
    static constexpr Scalar a21 = 1.0 / 5;
    static constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr Scalar b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const State& k1 = dydt_;
    const State k2 = rhs_(t_ + h / 5, (y_ + h * a21 * k1).eval());
    const State k3 = rhs_(t_ + 3 * h / 10, (y_ + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = rhs_(t_ + 4 * h / 5, (y_ + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 = rhs_(t_ + 8 * h / 9, (y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 =
        rhs_(t_ + h, (y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    y_new = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs_(t_ + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const State scale =
        (tol_ * (State::Ones(y_.size()) + y_.cwiseAbs().cwiseMax(y_new.cwiseAbs()))).eval();
    return err.cwiseAbs().cwiseQuotient(scale).maxCoeff();
  }

  Rhs rhs_;
  Scalar t_;
  State y_;
  State dydt_;
  Scalar tol_;
  Scalar h_max_;
  Scalar h_;
  long steps_ = 0;
};

template <typename State, typename Rhs>
DormandPrince<State, Rhs> make_dormand_prince(
    Rhs rhs, typename State::Scalar t0, const State& y0, typename State::Scalar tol,
    typename State::Scalar h_max = std::numeric_limits<typename State::Scalar>::infinity()) {
  return DormandPrince<State, Rhs>(std::move(rhs), t0, y0, tol, h_max);
}

}  // namespace airybohm
