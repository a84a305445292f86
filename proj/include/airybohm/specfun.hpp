#pragma once

#include <Eigen/Core>

namespace airybohm {

struct AiryValue {
  double ai;
  double ai_prime;
};

/// Airy function Ai(z) and its derivative on the real line.
///
/// Three regimes are stitched together:
///   - kSeriesLower <= z <= kSeriesUpper: Maclaurin series summed in binary128,
///     which absorbs the cancellation between the two power series;
///   - z > kSeriesUpper: exponentially decaying asymptotic expansion;
///   - z < kSeriesLower: modulus/phase (Hankel-type) asymptotic expansion.
/// Relative error is below 1e-12 for |z| <= 10 (measured against the local
/// envelope on the oscillatory axis), absolute error below 1e-14 beyond.
AiryValue airy_ai(double z);

template <typename Derived>
Eigen::ArrayXd airy_ai(const Eigen::ArrayBase<Derived>& z) {
  Eigen::ArrayXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = airy_ai(static_cast<double>(z(i))).ai;
  return out;
}

namespace detail {

inline constexpr double kSeriesUpper = 8.5;
inline constexpr double kSeriesLower = -8.0;

/// Ai, Ai' from the Maclaurin series with the two-term decomposition
/// Ai = c1 f(z) - c2 g(z). Real must support + - * / and construction from double.
template <typename Real>
void airy_maclaurin(Real z, Real c1, Real c2, Real& ai, Real& ai_prime) {
  const Real z3 = z * z * z;
  const Real eps = Real(1e-36);
  // f = sum T_k, T_0 = 1, T_k / T_{k-1} = z^3 / ((3k)(3k-1))
  // g = sum G_k, G_0 = z, G_k / G_{k-1} = z^3 / ((3k+1)(3k))
  Real tf = Real(1), f = Real(1);
  Real tg = z, g = z;
  // f' = sum_{k>=1} F_k, F_1 = z^2/2, ratio z^3 / ((3k-3)(3k-1))
  // g' = sum_{k>=0} H_k, H_0 = 1,     ratio z^3 / ((3k)(3k-2))
  Real tfp = z * z / Real(2), fp = tfp;
  Real tgp = Real(1), gp = Real(1);
  for (int k = 1; k < 400; ++k) {
    const Real k3 = Real(3 * k);
    tf = tf * z3 / (k3 * (k3 - Real(1)));
    tg = tg * z3 / ((k3 + Real(1)) * k3);
    tgp = tgp * z3 / (k3 * (k3 - Real(2)));
    if (k >= 2) tfp = tfp * z3 / ((k3 - Real(3)) * (k3 - Real(1)));
    f += tf;
    g += tg;
    gp += tgp;
    if (k >= 2) fp += tfp;
    auto mag = [](Real v) { return v < Real(0) ? -v : v; };
    if (k > 2 && mag(tf) <= eps * mag(f) + Real(1e-300) && mag(tg) <= eps * mag(g) + Real(1e-300) &&
        mag(tfp) <= eps * mag(fp) + Real(1e-300) && mag(tgp) <= eps * mag(gp) + Real(1e-300))
      break;
  }
  ai = c1 * f - c2 * g;
  ai_prime = c1 * fp - c2 * gp;
}

AiryValue airy_series(double z);
AiryValue airy_asymptotic_positive(double z);
AiryValue airy_asymptotic_negative(double z);

}  // namespace detail
}  // namespace airybohm
