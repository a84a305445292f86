#include "airybohm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "airybohm/errors.hpp"

namespace airybohm {

namespace {

double tabulated_at(const TabulatedTerm& tab, double t) {
  const auto& ts = tab.t;
  if (ts.size() == 1) return tab.value.front();
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  k = std::min(k, ts.size() - 2);
  const double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
  return tab.value[k] + s * (tab.value[k + 1] - tab.value[k]);
}

void check_tabulated(const TabulatedTerm& tab, const TimeWindow& w, const char* what) {
  std::ostringstream os;
  if (tab.t.empty() || tab.t.size() != tab.value.size()) {
    os << what << ": tabulated samples are empty or have mismatched lengths";
    throw TabulatedWindowError(os.str());
  }
  for (std::size_t i = 1; i < tab.t.size(); ++i) {
    if (!(tab.t[i] > tab.t[i - 1])) {
      os << what << ": tabulated times must be strictly increasing (sample " << i << ")";
      throw TabulatedWindowError(os.str());
    }
  }
  if (tab.t.front() > w.start || tab.t.back() < w.end) {
    os << what << ": tabulated samples cover [" << tab.t.front() << ", " << tab.t.back()
       << "] but the window is [" << w.start << ", " << w.end << "]";
    throw TabulatedWindowError(os.str());
  }
}

}  // namespace

double PotentialSpec::omega_sq_at(double t) const {
  struct Visitor {
    double t;
    double operator()(const ZeroTerm&) const { return 0.0; }
    double operator()(const ConstantTerm& c) const { return c.value; }
    double operator()(const MathieuTerm& m) const { return m.a - 2.0 * m.q * std::cos(2.0 * t / m.scale); }
    double operator()(const TabulatedTerm& tab) const { return tabulated_at(tab, t); }
  };
  return std::visit(Visitor{t}, omega_sq);
}

double PotentialSpec::force_at(double t) const {
  struct Visitor {
    double t;
    double operator()(const ZeroTerm&) const { return 0.0; }
    double operator()(const ConstantTerm& c) const { return c.value; }
    double operator()(const TabulatedTerm& tab) const { return tabulated_at(tab, t); }
  };
  return std::visit(Visitor{t}, force);
}

void PotentialSpec::require_covers(const TimeWindow& w) const {
  if (const auto* tab = std::get_if<TabulatedTerm>(&omega_sq)) check_tabulated(*tab, w, "omega_sq");
  if (const auto* tab = std::get_if<TabulatedTerm>(&force)) check_tabulated(*tab, w, "force");
}

double PotentialSpec::max_abs_omega_sq(const TimeWindow& w) const {
  double worst = 0.0;
  constexpr int n = 1000;
  for (int i = 0; i <= n; ++i) {
    const double t = w.start + (w.end - w.start) * i / n;
    worst = std::max(worst, std::abs(omega_sq_at(t)));
  }
  if (const auto* tab = std::get_if<TabulatedTerm>(&omega_sq))
    for (double v : tab->value) worst = std::max(worst, std::abs(v));
  return worst;
}

std::vector<double> PotentialSpec::breakpoints(const TimeWindow& w) const {
  std::vector<double> out;
  auto add = [&](const TabulatedTerm& tab) {
    for (double t : tab.t)
      if (t > w.start && t < w.end) out.push_back(t);
  };
  if (const auto* tab = std::get_if<TabulatedTerm>(&omega_sq)) add(*tab);
  if (const auto* tab = std::get_if<TabulatedTerm>(&force)) add(*tab);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace airybohm
