#include "airybohm/specfun.hpp"

#include <cmath>
#include <numbers>

namespace airybohm {
namespace detail {

namespace {

using quad = __float128;

// Ai(0) and -Ai'(0) as unevaluated double-double pairs.
const quad kAi0 = quad(0.3550280538878172) + quad(2.05233632436212e-17);
const quad kMinusAiPrime0 = quad(0.2588194037928068) + quad(-2.522243111610832e-17);

// Ratio u_k / u_{k-1} of the Airy asymptotic coefficients.
double u_ratio(int k) {
  const double kk = k;
  return (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
}

}  // namespace

AiryValue airy_series(double z) {
  quad ai, aip;
  airy_maclaurin<quad>(quad(z), kAi0, kMinusAiPrime0, ai, aip);
  return {static_cast<double>(ai), static_cast<double>(aip)};
}

AiryValue airy_asymptotic_positive(double z) {
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double inv = 1.0 / zeta;
  double u = 1.0, su = 1.0, sv = 1.0;
  double last = 1.0;
  double sign = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double v_over_u = -(6.0 * k + 1) / (6.0 * k - 1);
    const double u_next = u * u_ratio(k) * inv;
    if (u_next >= last) break;  // smallest term reached
    u = u_next;
    last = u;
    sign = -sign;
    su += sign * u;
    sv += sign * v_over_u * u;
    if (u < 1e-18) break;
  }
  const double pref = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  const double z14 = std::sqrt(std::sqrt(z));
  return {pref / z14 * su, -pref * z14 * sv};
}

AiryValue airy_asymptotic_negative(double z) {
  const double x = -z;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const double inv = 1.0 / zeta;
  // P, R collect even orders; Q, S collect odd orders, with alternating signs
  // within each parity.
  double p = 1.0, q = 0.0, r = 1.0, s = 0.0;
  double u = 1.0, last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double u_next = u * u_ratio(k) * inv;
    if (u_next >= last) break;
    u = u_next;
    last = u;
    const double v = -(6.0 * k + 1) / (6.0 * k - 1) * u;
    const int half = k / 2;
    const double sign = (half % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * u;
      r += sign * v;
    } else {
      q += sign * u;
      s += sign * v;
    }
    if (u < 1e-18) break;
  }
  // cos(zeta - pi/4) and sin(zeta - pi/4)
  const double c = std::cos(zeta), sn = std::sin(zeta);
  const double cm = (c + sn) * std::numbers::sqrt2 / 2.0;
  const double sm = (sn - c) * std::numbers::sqrt2 / 2.0;
  const double x14 = std::sqrt(std::sqrt(x));
  const double rsp = 1.0 / std::sqrt(std::numbers::pi);
  return {rsp / x14 * (cm * p + sm * q), rsp * x14 * (sm * r - cm * s)};
}

}  // namespace detail

AiryValue airy_ai(double z) {
  if (z > detail::kSeriesUpper) return detail::airy_asymptotic_positive(z);
  if (z < detail::kSeriesLower) return detail::airy_asymptotic_negative(z);
  return detail::airy_series(z);
}

}  // namespace airybohm
