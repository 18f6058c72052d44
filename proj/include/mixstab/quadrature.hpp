#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace mixstab {

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;      // estimated absolute error of value
  int subdivisions = 0;          // number of interval splits performed
  std::int64_t evaluations = 0;  // integrand evaluations
  bool converged = false;
  operator double() const { return value; }
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive abscissae;
// xgk[7] = 0). The embedded 7-point Gauss rule uses xgk[1], xgk[3], xgk[5]
// and the center.
inline constexpr double gk15_xgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double gk15_wgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double gk15_wg[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct GkEstimate {
  double value = 0.0;
  double error = 0.0;
  double resabs = 0.0;
};

// One GK 7/15 pass over [a, b] with the QUADPACK-style error estimate.
template <typename F>
GkEstimate gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  double fv_pos[7], fv_neg[7];
  const double fc = f(center);
  double resg = gk15_wg[3] * fc;
  double resk = gk15_wgk[7] * fc;
  double resabs = gk15_wgk[7] * std::fabs(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = hlgth * gk15_xgk[j];
    fv_pos[j] = f(center + dx);
    fv_neg[j] = f(center - dx);
    const double fsum = fv_pos[j] + fv_neg[j];
    resk += gk15_wgk[j] * fsum;
    resabs += gk15_wgk[j] * (std::fabs(fv_pos[j]) + std::fabs(fv_neg[j]));
    if (j % 2 == 1) resg += gk15_wg[j / 2] * fsum;
  }

  const double reskh = resk * 0.5;
  double resasc = gk15_wgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += gk15_wgk[j] * (std::fabs(fv_pos[j] - reskh) + std::fabs(fv_neg[j] - reskh));

  GkEstimate est;
  est.value = resk * hlgth;
  est.resabs = resabs * std::fabs(hlgth);
  resasc *= std::fabs(hlgth);
  double err = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (est.resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * est.resabs, err);
  est.error = err;
  return est;
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Globally adaptive bisection on [a, b]; splits the largest-error segment
// until sum(error) <= max(abs_tol, rel_tol * |sum(value)|).
template <typename F>
QuadratureResult adaptive_gk(F&& f, double a, double b, const QuadratureSettings& s) {
  QuadratureResult res;
  std::priority_queue<Segment> queue;
  auto first = gk15(f, a, b);
  res.evaluations = 15;
  double total_value = first.value;
  double total_error = first.error;
  queue.push(Segment{a, b, first.value, first.error});

  const double min_width = 64.0 * std::numeric_limits<double>::epsilon();
  double dead_value = 0.0, dead_error = 0.0;  // segments too narrow to split

  while (res.subdivisions < s.max_subdivisions) {
    const double tol = std::max(s.abs_tol, s.rel_tol * std::fabs(total_value));
    if (total_error <= tol || queue.empty()) break;
    Segment worst = queue.top();
    queue.pop();
    if (std::fabs(worst.b - worst.a) <= min_width * (1.0 + std::fabs(worst.a))) {
      dead_value += worst.value;
      dead_error += worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = gk15(f, worst.a, mid);
    auto right = gk15(f, mid, worst.b);
    res.evaluations += 30;
    ++res.subdivisions;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(Segment{worst.a, mid, left.value, left.error});
    queue.push(Segment{mid, worst.b, right.value, right.error});
  }

  res.value = total_value;
  res.error_bound = std::max(total_error, 0.0);
  res.converged =
      total_error <= std::max(s.abs_tol, s.rel_tol * std::fabs(total_value));
  (void)dead_value;
  (void)dead_error;
  return res;
}

}  // namespace detail

/// Integrates f over [k_min, k_max) where k_max may be infinite (the
/// default). The semi-infinite tail is mapped onto t in [0, 1) through
/// k = k_min + scale_k0 * t / (1 - t); scale_k0 sets the resolved scale and
/// should be of the order of the integrand's characteristic wavenumber.
/// Non-convergence is reported in the result, which still carries the best
/// estimate and its error bound.
template <typename F>
QuadratureResult integrate_semi_infinite(
    F&& f, double k_min, double scale_k0,
    const QuadratureSettings& settings = QuadratureSettings{},
    double k_max = std::numeric_limits<double>::infinity()) {
  if (!(scale_k0 > 0.0) || !std::isfinite(scale_k0))
    throw std::invalid_argument("integrate_semi_infinite: scale_k0 must be positive and finite");
  if (!(k_min >= 0.0) || !std::isfinite(k_min))
    throw std::invalid_argument("integrate_semi_infinite: k_min must be finite and >= 0");
  if (!(k_max > k_min))
    throw std::invalid_argument("integrate_semi_infinite: k_max must exceed k_min");

  if (std::isfinite(k_max))
    return detail::adaptive_gk(f, k_min, k_max, settings);

  auto mapped = [&f, k_min, scale_k0](double t) {
    const double omt = 1.0 - t;
    const double k = k_min + scale_k0 * t / omt;
    return f(k) * scale_k0 / (omt * omt);
  };
  return detail::adaptive_gk(mapped, 0.0, 1.0, settings);
}

}  // namespace mixstab
