#pragma once

#include <stdexcept>
#include <string>

namespace airybohm {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation requested at or beyond the first zero of delta(t).
class CausticDomainError : public Error {
 public:
  CausticDomainError(double t, double caustic_time);

  double requested_time() const { return t_; }
  double caustic_time() const { return caustic_time_; }

 private:
  double t_;
  double caustic_time_;
};

/// Tabulated potential samples do not cover the requested window.
class TabulatedWindowError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step control could not reach the requested tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

/// Invalid spatial grid (non power-of-two size, inverted domain, unresolved wavelengths).
class GridError : public Error {
 public:
  using Error::Error;
};

/// Norm drift of the split-step propagator exceeded its bound.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A time outside the solved or evolved window was requested.
class WindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace airybohm
