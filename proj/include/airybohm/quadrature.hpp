#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace airybohm {

/// Cubic Hermite interpolant on [t0, t1] from values and derivatives.
inline double hermite(double t0, double t1, double y0, double y1, double d0, double d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

/// Eight-point Gauss-Legendre rule on [a, b].
template <typename F>
double gauss_legendre8(F&& f, double a, double b) {
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                              0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double sum = 0;
  for (int i = 0; i < 4; ++i) sum += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
  return sum * r;
}

namespace detail {

template <typename F>
std::pair<double, double> kronrod15(F& f, double a, double b) {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wk[7] * fc, gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double s = f(c - r * xk[i]) + f(c + r * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  return {kron * r, std::abs((kron - gauss) * r)};
}

template <typename F>
double adaptive_gk(F& f, double a, double b, double tol, int depth) {
  auto [value, err] = kronrod15(f, a, b);
  if (err <= tol || err <= 1e-15 * std::abs(value) || depth >= 50) return value;
  const double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, 0.5 * tol, depth + 1) + adaptive_gk(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7, 15) quadrature with recursive bisection.
template <typename F>
double integrate_adaptive(F f, double a, double b, double abs_tol = 1e-12) {
  if (a == b) return 0.0;
  return detail::adaptive_gk(f, a, b, abs_tol, 0);
}

}  // namespace airybohm
