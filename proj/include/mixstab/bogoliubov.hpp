#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mixstab/eigen4.hpp"
#include "mixstab/params.hpp"

namespace mixstab {

/// Dimensionless soft/hard gap entering omega^2 = eps (eps + 2 c). The soft
/// branch carries the interspecies fluctuation shift f12 = nt12 + mt12; the
/// hard branch does not.
inline double branch_gap(Branch b, double lambda, double f12) {
  return b == Branch::minus ? (1.0 - lambda) - lambda * f12 : 1.0 + lambda;
}

/// Soft-branch dispersion in units of g nc / hbar versus eps = kinetic energy
/// in units of g nc. Purely imaginary when the mode is dynamically unstable.
inline std::complex<double> dispersion_minus(double eps, double lambda, double f12) {
  const double radicand = eps * (eps + 2.0 * branch_gap(Branch::minus, lambda, f12));
  return std::sqrt(std::complex<double>(radicand, 0.0));
}

/// Hard-branch dispersion; independent of the interspecies fluctuations.
inline std::complex<double> dispersion_plus(double eps, double lambda) {
  const double radicand = eps * (eps + 2.0 * branch_gap(Branch::plus, lambda, 0.0));
  return std::sqrt(std::complex<double>(radicand, 0.0));
}

/// Residual of the lambda -> -lambda mapping between the branches. The mean
/// field gap term is negated while the correlation term keeps the physical
/// lambda, so the result is identically zero iff f12 = 0:
/// gap = sqrt(eps(eps + 2(1+lambda) - 2 lambda f12)) - sqrt(eps(eps + 2(1+lambda))).
inline double symmetry_breaking_gap(double eps, double lambda, double f12) {
  const double ra = eps * (eps + 2.0 * (1.0 + lambda) - 2.0 * lambda * f12);
  const double rb = eps * (eps + 2.0 * (1.0 + lambda));
  if (ra < 0.0 || rb < 0.0)
    throw std::domain_error("symmetry_breaking_gap: branch unstable at these parameters");
  return std::sqrt(ra) - std::sqrt(rb);
}

/// Kinetic energy in units of g nc for the balanced mixture.
inline double kinetic_eps(double k, const SymmetricParams& s) {
  return s.hbar * s.hbar * k * k / (2.0 * s.m * s.g * s.nc);
}

/// Sector Bogoliubov amplitudes of the balanced mixture, normalized to
/// u^2 - v^2 = 1. u > 0; v carries the sign of the gap.
struct SectorAmplitudes {
  double u = 0.0;
  double v = 0.0;
};

inline SectorAmplitudes amplitudes_symmetric(double eps, Branch b, double lambda,
                                             double f12) {
  const double c = branch_gap(b, lambda, f12);
  const double radicand = eps * (eps + 2.0 * c);
  if (!(eps > 0.0) || !(radicand > 0.0))
    throw std::domain_error(
        "amplitudes_symmetric: amplitudes undefined for a zero or unstable mode");
  const double omega = std::sqrt(radicand);
  const double u = std::sqrt((eps + c + omega) / (2.0 * omega));
  return SectorAmplitudes{u, c / (2.0 * omega * u)};
}

/// Cancellation-free amplitude combinations used by the fluctuation
/// integrals: v^2 = c^2 / (2 w (eps + c + w)), u v = c / (2 w),
/// v^2 - u v = -c (eps + w) / (2 w (eps + c + w)), (u - v)^2 = 1 / (u + v)^2.
struct AmplitudeProducts {
  double omega = 0.0;
  double u2 = 0.0;
  double v2 = 0.0;
  double uv = 0.0;
  double v2_minus_uv = 0.0;
  double umv_sq = 0.0;  // (u - v)^2
};

inline AmplitudeProducts amplitude_products(double eps, double c) {
  const double radicand = eps * (eps + 2.0 * c);
  if (!(eps > 0.0) || !(radicand > 0.0))
    throw std::domain_error("amplitude_products: undefined for a zero or unstable mode");
  AmplitudeProducts p;
  p.omega = std::sqrt(radicand);
  p.v2 = c * c / (2.0 * p.omega * (eps + c + p.omega));
  p.u2 = 1.0 + p.v2;
  p.uv = c / (2.0 * p.omega);
  p.v2_minus_uv = -c * (eps + p.omega) / (2.0 * p.omega * (eps + c + p.omega));
  p.umv_sq = c > 0.0 ? 1.0 / (p.u2 + p.v2 + 2.0 * p.uv) : p.u2 + p.v2 - 2.0 * p.uv;
  return p;
}

/// Generalized Bogoliubov-de Gennes matrix in the basis (U1, V1, U2, V2),
/// entries in energy units. Diagonal blocks carry the fluctuation-shifted
/// single-species problem, off-diagonal blocks the interspecies coupling:
///   e_i  = hbar^2 k^2 / (2 m_i) + g_ii nc_i (1 - mt_ii) - g12 nc_j f12
///   K_ii = g_ii nc_i (1 + mt_ii)
///   H_12 = g12 sqrt(nc1 nc2) (1 + nt12),  K_12 = g12 sqrt(nc1 nc2) (1 + mt12).
inline Mat4 bdg_matrix(double k, const MixtureParams& p, const FluctuationSet& fl) {
  const double f12 = fl.f12();
  const double kin1 = p.hbar * p.hbar * k * k / (2.0 * p.m1);
  const double kin2 = p.hbar * p.hbar * k * k / (2.0 * p.m2);
  const double e1 = kin1 + p.g11 * p.nc1 * (1.0 - fl.mt11) - p.g12 * p.nc2 * f12;
  const double e2 = kin2 + p.g22 * p.nc2 * (1.0 - fl.mt22) - p.g12 * p.nc1 * f12;
  const double k11 = p.g11 * p.nc1 * (1.0 + fl.mt11);
  const double k22 = p.g22 * p.nc2 * (1.0 + fl.mt22);
  const double gcross = p.g12 * std::sqrt(p.nc1 * p.nc2);
  const double h12 = gcross * (1.0 + fl.nt12);
  const double k12 = gcross * (1.0 + fl.mt12);
  return Mat4{{{e1, -k11, h12, -k12},
               {k11, -e1, k12, -h12},
               {h12, -k12, e2, -k22},
               {k12, -h12, k22, -e2}}};
}

enum class ModeBranch { minus, plus, general };

inline const char* to_string(ModeBranch b) {
  switch (b) {
    case ModeBranch::minus: return "minus";
    case ModeBranch::plus: return "plus";
    default: return "general";
  }
}

/// One physical excitation of the 4x4 problem. Stable modes are normalized to
/// Bogoliubov norm u1^2 - v1^2 + u2^2 - v2^2 = +1 with phase u1 > 0; complex
/// frequencies mark dynamical instability (data, not an error) and keep the
/// unnormalized near-null amplitudes.
struct BdgMode {
  std::complex<double> omega;  // rad / time
  double u1 = 0.0, v1 = 0.0, u2 = 0.0, v2 = 0.0;
  double norm = 0.0;  // recomputed from the stored amplitudes
  bool unstable = false;
  ModeBranch branch = ModeBranch::general;
  double residual = 0.0;  // eigenpair residual relative to ||M||
};

/// Diagonalizes the BdG matrix at wavenumber k, keeping the physical
/// (positive-norm) modes and flagging dynamically unstable ones. Negative-norm
/// partners are discarded. Requires k > 0 (the k = 0 Goldstone pair is
/// norm-degenerate).
inline std::vector<BdgMode> solve_bdg(double k, const MixtureParams& p,
                                      const FluctuationSet& fl) {
  if (!(k > 0.0)) throw std::invalid_argument("solve_bdg: requires k > 0");
  require_valid(p);
  if (!(p.g11 > 0.0) || !(p.g22 > 0.0))
    throw std::invalid_argument("solve_bdg: requires g11 > 0 and g22 > 0");
  const Mat4 m = bdg_matrix(k, p, fl);
  const double scale = std::max(detail::mat_norm_inf(m), 1e-300);
  const auto eig = eigen_4x4(m);

  const double tol_im = 1e-10 * scale;
  const double tol_norm = 1e-8;
  const bool balanced = is_balanced(p) && fl.is_species_symmetric();

  std::vector<BdgMode> modes;
  for (const auto& pair : eig) {
    BdgMode mode;
    auto vec = pair.vector;  // unit 2-norm, dominant entry real positive
    const double jnorm = std::norm(vec[0]) - std::norm(vec[1]) + std::norm(vec[2]) -
                         std::norm(vec[3]);
    if (std::fabs(std::imag(pair.value)) > tol_im) {
      if (std::imag(pair.value) < 0.0) continue;  // conjugate partner
      mode.unstable = true;
      mode.u1 = std::real(vec[0]);
      mode.v1 = std::real(vec[1]);
      mode.u2 = std::real(vec[2]);
      mode.v2 = std::real(vec[3]);
    } else {
      if (jnorm <= tol_norm) continue;  // negative-norm partner or null mode
      const double inv = 1.0 / std::sqrt(jnorm);
      mode.u1 = std::real(vec[0]) * inv;
      mode.v1 = std::real(vec[1]) * inv;
      mode.u2 = std::real(vec[2]) * inv;
      mode.v2 = std::real(vec[3]) * inv;
      if (mode.u1 < 0.0 || (mode.u1 == 0.0 && mode.v1 < 0.0)) {
        mode.u1 = -mode.u1;
        mode.v1 = -mode.v1;
        mode.u2 = -mode.u2;
        mode.v2 = -mode.v2;
      }
    }
    mode.norm = mode.u1 * mode.u1 - mode.v1 * mode.v1 + mode.u2 * mode.u2 -
                mode.v2 * mode.v2;
    mode.omega = std::complex<double>(std::real(pair.value), std::imag(pair.value)) /
                 p.hbar;
    if (std::fabs(std::imag(pair.value)) <= tol_im)
      mode.omega = std::complex<double>(std::real(pair.value) / p.hbar, 0.0);
    mode.residual = pair.residual / scale;
    if (balanced) {
      // Parity labels from the residual of u2 = -u1, v2 = -v1 (minus) versus
      // u2 = +u1, v2 = +v1 (plus). Degenerate eigenvectors (lambda = 0, where
      // any basis of the pair is valid) satisfy neither and stay general.
      const double uv_scale = std::fabs(mode.u1) + std::fabs(mode.v1) +
                              std::fabs(mode.u2) + std::fabs(mode.v2);
      const double res_minus =
          std::fabs(mode.u2 + mode.u1) + std::fabs(mode.v2 + mode.v1);
      const double res_plus =
          std::fabs(mode.u2 - mode.u1) + std::fabs(mode.v2 - mode.v1);
      if (res_minus <= 1e-6 * uv_scale)
        mode.branch = ModeBranch::minus;
      else if (res_plus <= 1e-6 * uv_scale)
        mode.branch = ModeBranch::plus;
    }
    modes.push_back(mode);
  }

  std::sort(modes.begin(), modes.end(), [](const BdgMode& a, const BdgMode& b) {
    if (std::real(a.omega) != std::real(b.omega))
      return std::real(a.omega) < std::real(b.omega);
    return std::imag(a.omega) < std::imag(b.omega);
  });
  return modes;
}

}  // namespace mixstab
