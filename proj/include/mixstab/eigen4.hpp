#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace mixstab {

using Mat4 = std::array<std::array<double, 4>, 4>;

struct EigenPair {
  std::complex<double> value{};
  std::array<std::complex<double>, 4> vector{};  // unit 2-norm, largest entry real > 0
  double residual = 0.0;                         // ||A v - lambda v||_2
};

namespace detail {

using cplx = std::complex<double>;

inline double mat_norm_inf(const Mat4& a) {
  double n = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double x : row) s += std::fabs(x);
    n = std::max(n, s);
  }
  return n;
}

// Monic characteristic polynomial x^4 + c[0] x^3 + c[1] x^2 + c[2] x + c[3]
// by the Faddeev-LeVerrier recursion.
inline std::array<double, 4> char_poly(const Mat4& a) {
  auto mul = [](const Mat4& x, const Mat4& y) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const double xik = x[i][k];
        if (xik == 0.0) continue;
        for (int j = 0; j < 4; ++j) r[i][j] += xik * y[k][j];
      }
    return r;
  };
  auto trace = [](const Mat4& x) { return x[0][0] + x[1][1] + x[2][2] + x[3][3]; };

  std::array<double, 4> c{};
  Mat4 m = a;
  c[0] = -trace(m);
  for (int step = 1; step < 4; ++step) {
    Mat4 shifted = m;
    for (int i = 0; i < 4; ++i) shifted[i][i] += c[step - 1];
    m = mul(a, shifted);
    c[step] = -trace(m) / double(step + 1);
  }
  return c;
}

inline cplx poly_eval(const std::array<double, 4>& c, cplx x) {
  return (((x + c[0]) * x + c[1]) * x + c[2]) * x + c[3];
}

inline cplx poly_deriv(const std::array<double, 4>& c, cplx x) {
  return ((4.0 * x + 3.0 * c[0]) * x + 2.0 * c[1]) * x + c[2];
}

// Stable quadratic roots of z^2 + b z + c.
inline std::array<cplx, 2> quadratic_roots(cplx b, cplx c) {
  cplx s = std::sqrt(b * b - 4.0 * c);
  if (std::real(std::conj(b) * s) > 0.0) s = -s;  // b - s has no cancellation
  const cplx z1 = 0.5 * (-b + s);
  const cplx z2 = (std::abs(z1) > 0.0) ? c / z1 : 0.5 * (-b - s);
  return {z1, z2};
}

// All roots of m^3 + a m^2 + b m + c, real coefficients.
inline std::array<cplx, 3> cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  std::array<cplx, 3> r;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-0.5 * q + sq);
    const double v = std::cbrt(-0.5 * q - sq);
    r[0] = shift + (u + v);
    const double re = shift - 0.5 * (u + v);
    const double im = 0.5 * std::sqrt(3.0) * (u - v);
    r[1] = cplx(re, im);
    r[2] = cplx(re, -im);
  } else {
    const double rho = std::sqrt(-p * p * p / 27.0);
    const double theta = std::acos(std::clamp(-0.5 * q / rho, -1.0, 1.0));
    const double mag = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k)
      r[k] = shift + mag * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0);
  }
  return r;
}

// Ferrari resolution of the depressed quartic y^4 + p y^2 + q y + r.
inline std::array<cplx, 4> depressed_quartic_roots(double p, double q, double r) {
  const double scale = 1.0 + std::fabs(p) + std::sqrt(std::fabs(r));
  if (std::fabs(q) <= 1e-14 * scale * scale) {
    // Biquadratic: y^2 solves w^2 + p w + r = 0.
    const auto w = quadratic_roots(cplx(p), cplx(r));
    const cplx s0 = std::sqrt(w[0]), s1 = std::sqrt(w[1]);
    return {s0, -s0, s1, -s1};
  }
  // Resolvent cubic m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0; pick the root of
  // largest magnitude (keeps sqrt(2m) well away from zero since q != 0).
  const auto ms = cubic_roots(p, 0.25 * p * p - r, -0.125 * q * q);
  cplx m = ms[0];
  for (const auto& cand : ms)
    if (std::abs(cand) > std::abs(m)) m = cand;
  const cplx s2m = std::sqrt(2.0 * m);
  const cplx t = q / (2.0 * s2m);
  const auto q1 = quadratic_roots(-s2m, 0.5 * p + m + t);
  const auto q2 = quadratic_roots(s2m, 0.5 * p + m - t);
  return {q1[0], q1[1], q2[0], q2[1]};
}

// Roots of the monic quartic with coefficients c (as in char_poly).
inline std::array<cplx, 4> quartic_roots(const std::array<double, 4>& c) {
  // Scale x = s z so the scaled coefficients are O(1).
  double s = 0.0;
  const double mags[4] = {std::fabs(c[0]), std::sqrt(std::fabs(c[1])),
                          std::cbrt(std::fabs(c[2])),
                          std::pow(std::fabs(c[3]), 0.25)};
  for (double m : mags) s = std::max(s, m);
  if (s == 0.0) return {cplx(0), cplx(0), cplx(0), cplx(0)};
  const double a = c[0] / s;
  const double b = c[1] / (s * s);
  const double cc = c[2] / (s * s * s);
  const double d = c[3] / (s * s * s * s);

  const double p = b - 3.0 * a * a / 8.0;
  const double q = cc - 0.5 * a * b + a * a * a / 8.0;
  const double r = d - 0.25 * a * cc + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
  auto roots = depressed_quartic_roots(p, q, r);
  for (auto& z : roots) z = s * (z - 0.25 * a);

  // Newton polish on the unscaled quartic.
  for (auto& z : roots)
    for (int it = 0; it < 3; ++it) {
      const cplx dp = poly_deriv(c, z);
      if (std::abs(dp) == 0.0) break;
      z -= poly_eval(c, z) / dp;
    }

  // Durand-Kerner fallback if any residual is out of line.
  double worst = 0.0;
  for (const auto& z : roots) worst = std::max(worst, std::abs(poly_eval(c, z)));
  if (!(worst <= 1e-8 * std::pow(s, 4)) || !std::isfinite(worst)) {
    std::array<cplx, 4> zk;
    const cplx seed(0.4, 0.9);
    zk[0] = seed * s;
    for (int j = 1; j < 4; ++j) zk[j] = zk[j - 1] * seed;
    for (int it = 0; it < 200; ++it) {
      double step = 0.0;
      for (int j = 0; j < 4; ++j) {
        cplx denom(1.0);
        for (int k = 0; k < 4; ++k)
          if (k != j) denom *= zk[j] - zk[k];
        if (std::abs(denom) == 0.0) {
          zk[j] += 1e-8 * s;
          continue;
        }
        const cplx delta = poly_eval(c, zk[j]) / denom;
        zk[j] -= delta;
        step = std::max(step, std::abs(delta));
      }
      if (step <= 1e-15 * s) break;
    }
    double worst_dk = 0.0;
    for (const auto& z : zk) worst_dk = std::max(worst_dk, std::abs(poly_eval(c, z)));
    if (worst_dk < worst) roots = zk;
  }
  return roots;
}

// Solves (A - lambda I) x = b (or the transposed system) by Gaussian
// elimination with partial pivoting; near-singular pivots are inflated, which
// is exactly what inverse iteration wants.
inline std::array<cplx, 4> solve_shifted(const Mat4& a, cplx lambda,
                                         std::array<cplx, 4> b, bool transposed,
                                         double scale) {
  std::array<std::array<cplx, 4>, 4> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m[i][j] = cplx(transposed ? a[j][i] : a[i][j]) - (i == j ? lambda : cplx(0));

  const double floor_pivot = 1e-300 + 1e-20 * scale;
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      std::swap(b[piv], b[col]);
    }
    if (std::abs(m[col][col]) < floor_pivot) m[col][col] = floor_pivot;
    for (int r = col + 1; r < 4; ++r) {
      const cplx f = m[r][col] / m[col][col];
      if (f == cplx(0)) continue;
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
      b[r] -= f * b[col];
    }
  }
  std::array<cplx, 4> x{};
  for (int i = 3; i >= 0; --i) {
    cplx acc = b[i];
    for (int j = i + 1; j < 4; ++j) acc -= m[i][j] * x[j];
    x[i] = acc / m[i][i];
  }
  return x;
}

inline double vec_norm(const std::array<cplx, 4>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

inline void normalize(std::array<cplx, 4>& v) {
  const double n = vec_norm(v);
  if (n > 0.0)
    for (auto& x : v) x /= n;
}

inline std::array<cplx, 4> mat_apply(const Mat4& a, const std::array<cplx, 4>& v) {
  std::array<cplx, 4> r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i] += a[i][j] * v[j];
  return r;
}

// Two-sided Rayleigh-quotient refinement. Characteristic-polynomial roots
// lose accuracy for eigenvalues much smaller than ||A|| (the determinant
// cancels); a few inverse-iteration sweeps restore backward-stable accuracy.
inline cplx refine_eigenvalue(const Mat4& a, cplx lambda, double scale) {
  // Fixed deterministic seed with no accidental orthogonality to the
  // symmetric/antisymmetric sectors of Bogoliubov-structured matrices.
  const std::array<cplx, 4> seed = {cplx(1.0), cplx(0.6180339887498949),
                                    cplx(0.3819660112501051), cplx(0.2360679774997897)};
  std::array<cplx, 4> v = seed, w = seed;
  for (int it = 0; it < 4; ++it) {
    v = solve_shifted(a, lambda, v, false, scale);
    normalize(v);
    w = solve_shifted(a, lambda, w, true, scale);
    normalize(w);
    cplx denom(0);
    for (int i = 0; i < 4; ++i) denom += w[i] * v[i];  // bilinear, not Hermitian
    if (std::abs(denom) < 1e-12) break;                // defective direction; keep lambda
    const auto av = mat_apply(a, v);
    cplx num(0);
    for (int i = 0; i < 4; ++i) num += w[i] * av[i];
    const cplx next = num / denom;
    if (!std::isfinite(std::real(next)) || !std::isfinite(std::imag(next))) break;
    if (std::abs(next - lambda) <= 1e-15 * (1.0 + std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

// Null-space basis of (A - lambda I) via full-pivot elimination.
inline std::vector<std::array<cplx, 4>> null_space(const Mat4& a, cplx lambda,
                                                   double scale) {
  std::array<std::array<cplx, 4>, 4> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m[i][j] = cplx(a[i][j]) - (i == j ? lambda : cplx(0));

  std::array<int, 4> col_perm = {0, 1, 2, 3};
  const double rank_tol = 1e-8 * (scale + std::abs(lambda)) + 1e-300;
  int rank = 0;
  for (int step = 0; step < 4; ++step) {
    int pr = step, pc = step;
    double best = 0.0;
    for (int i = step; i < 4; ++i)
      for (int j = step; j < 4; ++j)
        if (std::abs(m[i][j]) > best) {
          best = std::abs(m[i][j]);
          pr = i;
          pc = j;
        }
    if (best <= rank_tol) break;
    std::swap(m[pr], m[step]);
    if (pc != step) {
      for (int i = 0; i < 4; ++i) std::swap(m[i][pc], m[i][step]);
      std::swap(col_perm[pc], col_perm[step]);
    }
    for (int r = step + 1; r < 4; ++r) {
      const cplx f = m[r][step] / m[step][step];
      if (f == cplx(0)) continue;
      for (int j = step; j < 4; ++j) m[r][j] -= f * m[step][j];
    }
    ++rank;
  }

  std::vector<std::array<cplx, 4>> basis;
  for (int free = rank; free < 4; ++free) {
    std::array<cplx, 4> xp{};
    xp[free] = cplx(1);
    for (int p = rank - 1; p >= 0; --p) {
      cplx acc(0);
      for (int j = p + 1; j < 4; ++j) acc += m[p][j] * xp[j];
      xp[p] = -acc / m[p][p];
    }
    std::array<cplx, 4> x{};
    for (int j = 0; j < 4; ++j) x[col_perm[j]] = xp[j];
    normalize(x);
    basis.push_back(x);
  }
  return basis;
}

inline void fix_phase(std::array<cplx, 4>& v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < 4; ++i)
    if (std::abs(v[i]) > best + 1e-15) {
      best = std::abs(v[i]);
      imax = i;
    }
  if (best <= 0.0) return;
  const cplx phase = std::conj(v[imax]) / std::abs(v[imax]);
  for (auto& x : v) x *= phase;
}

}  // namespace detail

/// Dense eigendecomposition of a real 4x4 matrix. Eigenvalues are returned
/// sorted by (re, im) ascending; eigenvectors have unit 2-norm with the
/// largest-magnitude entry made real positive; residual is ||A v - lambda v||.
/// Repeated eigenvalues with full geometric multiplicity receive linearly
/// independent vectors; defective directions fall back to the best available
/// null vector (visible through the residual).
inline std::array<EigenPair, 4> eigen_4x4(const Mat4& a) {
  using detail::cplx;
  const double scale = detail::mat_norm_inf(a);
  auto roots = detail::quartic_roots(detail::char_poly(a));
  for (auto& z : roots) z = detail::refine_eigenvalue(a, z, scale);

  std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) {
    if (std::real(x) != std::real(y)) return std::real(x) < std::real(y);
    return std::imag(x) < std::imag(y);
  });

  std::array<EigenPair, 4> out;
  const double cluster_tol = 1e-8 * (1.0 + scale);
  int i = 0;
  while (i < 4) {
    int j = i + 1;
    while (j < 4 && std::abs(roots[j] - roots[j - 1]) <= cluster_tol) ++j;
    cplx rep(0);
    for (int k = i; k < j; ++k) rep += roots[k];
    rep /= double(j - i);
    auto basis = detail::null_space(a, rep, scale);
    if (basis.empty())
      basis = detail::null_space(a, rep, scale * 1e6);  // defective; take best effort
    for (int k = i; k < j; ++k) {
      out[k].value = roots[k];
      out[k].vector = basis[std::min<std::size_t>(k - i, basis.size() - 1)];
      detail::fix_phase(out[k].vector);
      auto av = detail::mat_apply(a, out[k].vector);
      double res = 0.0;
      for (int q = 0; q < 4; ++q) res += std::norm(av[q] - roots[k] * out[k].vector[q]);
      out[k].residual = std::sqrt(res);
    }
    i = j;
  }
  return out;
}

}  // namespace mixstab
