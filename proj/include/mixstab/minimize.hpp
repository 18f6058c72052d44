#pragma once

#include <cmath>
#include <stdexcept>

namespace mixstab {

struct MinimizeResult {
  double x_star = 0.0;
  double f_star = 0.0;
  int iterations = 0;
  double lo = 0.0;  // bracket actually used
  double hi = 0.0;
  bool converged = false;
  /// x_star ended up within tolerance of a bracket edge; the minimum is not
  /// interior (monotone objective or boundary minimum).
  bool at_boundary = false;
};

/// Scalar minimization on [lo, hi]: golden-section steps with parabolic
/// acceleration (Brent). Stops when |x - argmin| <= tol * (1 + |x|).
/// The objective must be continuous; no derivative is used.
template <typename F>
MinimizeResult minimize_scalar(F&& f, double lo, double hi, double tol = 1e-10,
                               int max_iter = 200) {
  if (!(lo < hi))
    throw std::invalid_argument("minimize_scalar: requires lo < hi");
  if (!(tol > 0.0))
    throw std::invalid_argument("minimize_scalar: requires tol > 0");

  constexpr double golden = 0.3819660112501051;  // 2 - phi
  double a = lo, b = hi;
  double x = a + golden * (b - a);
  double w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  MinimizeResult res;
  res.lo = lo;
  res.hi = hi;

  int it = 0;
  for (; it < max_iter; ++it) {
    const double mid = 0.5 * (a + b);
    const double tol1 = tol * (1.0 + std::fabs(x));
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a)) {
      res.converged = true;
      break;
    }
    bool take_golden = true;
    if (std::fabs(e) > tol1) {
      // Parabola through (v, fv), (w, fw), (x, fx).
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double e_prev = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * e_prev) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u_try = x + d;
        if (u_try - a < tol2 || b - u_try < tol2)
          d = (mid > x) ? tol1 : -tol1;
        take_golden = false;
      }
    }
    if (take_golden) {
      e = (x < mid) ? b - x : a - x;
      d = golden * e;
    }
    const double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }

  res.x_star = x;
  res.f_star = fx;
  res.iterations = it;
  const double edge_tol = 2.0 * tol * (1.0 + std::fabs(x));
  res.at_boundary = (x - lo <= edge_tol) || (hi - x <= edge_tol);
  return res;
}

}  // namespace mixstab
