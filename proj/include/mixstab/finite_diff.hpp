#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace mixstab {

struct GradientHessian {
  std::array<double, 2> grad{};
  std::array<std::array<double, 2>, 2> hess{};  // symmetric by construction
};

/// Central finite differences with one Richardson extrapolation level
/// (leading error O(h^4)) for a scalar function of two variables.
/// Step per axis: h_i = h_rel * (1 + |x_i|).
template <typename F>
GradientHessian fd_gradient_hessian(F&& f, std::array<double, 2> x,
                                    double h_rel = 1e-4) {
  if (!(h_rel > 0.0))
    throw std::invalid_argument("fd_gradient_hessian: requires h_rel > 0");

  const double h0 = h_rel * (1.0 + std::fabs(x[0]));
  const double h1 = h_rel * (1.0 + std::fabs(x[1]));
  auto at = [&f](double a, double b) { return f(std::array<double, 2>{a, b}); };
  const double f00 = at(x[0], x[1]);

  auto richardson = [](double coarse, double fine) {
    return (4.0 * fine - coarse) / 3.0;
  };

  GradientHessian out;
  const double hs[2] = {h0, h1};
  for (int i = 0; i < 2; ++i) {
    auto shift = [&](double d) {
      return i == 0 ? at(x[0] + d, x[1]) : at(x[0], x[1] + d);
    };
    const double h = hs[i];
    const double fp = shift(h), fm = shift(-h);
    const double fp2 = shift(0.5 * h), fm2 = shift(-0.5 * h);
    const double d_h = (fp - fm) / (2.0 * h);
    const double d_h2 = (fp2 - fm2) / h;
    out.grad[i] = richardson(d_h, d_h2);
    const double s_h = (fp - 2.0 * f00 + fm) / (h * h);
    const double s_h2 = (fp2 - 2.0 * f00 + fm2) / (0.25 * h * h);
    out.hess[i][i] = richardson(s_h, s_h2);
  }

  auto cross = [&](double d0, double d1) {
    return (at(x[0] + d0, x[1] + d1) - at(x[0] + d0, x[1] - d1) -
            at(x[0] - d0, x[1] + d1) + at(x[0] - d0, x[1] - d1)) /
           (4.0 * d0 * d1);
  };
  const double c_h = cross(h0, h1);
  const double c_h2 = cross(0.5 * h0, 0.5 * h1);
  const double c = richardson(c_h, c_h2);
  out.hess[0][1] = c;
  out.hess[1][0] = c;
  return out;
}

}  // namespace mixstab
