#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mixstab/finite_diff.hpp"
#include "mixstab/params.hpp"

namespace mixstab {

/// Ground-state energy density including quadratic fluctuation terms:
/// E = 1/2 g11 n1^2 + 1/2 g22 n2^2 + g12 n1 n2
///   + 1/2 g11 nc1^2 [2(nt11+mt11) + nt11^2 + mt11^2]  (+ species 2 mirrored)
///   + g12 nc1 nc2 [2(nt12+mt12) + nt12^2 + mt12^2].
inline double energy_density(const MixtureParams& p, const FluctuationSet& fl) {
  auto bracket = [](double nt, double mt) {
    return 2.0 * (nt + mt) + nt * nt + mt * mt;
  };
  return 0.5 * p.g11 * p.n1 * p.n1 + 0.5 * p.g22 * p.n2 * p.n2 + p.g12 * p.n1 * p.n2 +
         0.5 * p.g11 * p.nc1 * p.nc1 * bracket(fl.nt11, fl.mt11) +
         0.5 * p.g22 * p.nc2 * p.nc2 * bracket(fl.nt22, fl.mt22) +
         p.g12 * p.nc1 * p.nc2 * bracket(fl.nt12, fl.mt12);
}

/// First derivatives of the energy density with respect to the condensate
/// densities (unreduced fluctuation averages held fixed, n_i moving with nc_i):
/// mu_1 = g11 n1 + g12 n2 + g11 nc1 (nt11+mt11) + g12 nc2 (nt12+mt12).
inline std::array<double, 2> chemical_potentials(const MixtureParams& p,
                                                 const FluctuationSet& fl) {
  const double mu1 = p.g11 * p.n1 + p.g12 * p.n2 + p.g11 * p.nc1 * (fl.nt11 + fl.mt11) +
                     p.g12 * p.nc2 * fl.f12();
  const double mu2 = p.g22 * p.n2 + p.g12 * p.n1 + p.g22 * p.nc2 * (fl.nt22 + fl.mt22) +
                     p.g12 * p.nc1 * fl.f12();
  return {mu1, mu2};
}

struct GeneralizedCouplings {
  double g1 = 0.0;
  double g2 = 0.0;
  double g12 = 0.0;
};

/// Second derivatives of the energy density under the same convention; the
/// interspecies fluctuations renormalize both the diagonal and the
/// off-diagonal curvature:
/// G1 = g11 - g12 (f12/2) nc2/nc1, G12 = g12 (1 + f12/2).
inline GeneralizedCouplings generalized_couplings(const MixtureParams& p,
                                                  const FluctuationSet& fl) {
  const double half_f12 = 0.5 * fl.f12();
  GeneralizedCouplings g;
  g.g1 = p.g11 - p.g12 * half_f12 * (p.nc2 / p.nc1);
  g.g2 = p.g22 - p.g12 * half_f12 * (p.nc1 / p.nc2);
  g.g12 = p.g12 * (1.0 + half_f12);
  return g;
}

enum class Verdict { stable, collapse, separation, both, marginal };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::collapse: return "collapse";
    case Verdict::separation: return "separation";
    case Verdict::both: return "both";
    default: return "marginal";
  }
}

struct FdCheck {
  bool run = false;
  double grad_rel_err = 0.0;
  double hess_rel_err = 0.0;
  /// Agreement within 1e-6; beyond 1e-4 is treated as an internal error.
  bool agrees = false;
};

struct StabilityReport {
  MixtureParams params{};
  FluctuationSet fluctuations{};
  GeneralizedCouplings couplings{};
  double trace_a = 0.0;
  double det_a = 0.0;
  Verdict verdict = Verdict::stable;
  FdCheck fd{};
};

namespace detail {

// Verdict from the curvature matrix A = [[G1, G12], [G12, G2]]: Tr A <= 0
// signals collapse, Det A <= 0 signals separation. Values inside a tight
// relative band around zero classify as marginal so parameter scans crossing
// the boundary surfaces do not jitter.
inline Verdict classify(const GeneralizedCouplings& g, double trace_a, double det_a) {
  const double tr_band = 1e-12 * (std::fabs(g.g1) + std::fabs(g.g2));
  const double det_band = 1e-12 * (std::fabs(g.g1 * g.g2) + g.g12 * g.g12);
  const bool tr_marginal = std::fabs(trace_a) <= tr_band;
  const bool det_marginal = std::fabs(det_a) <= det_band;
  if (tr_marginal || det_marginal) return Verdict::marginal;
  const bool collapse = trace_a < 0.0;
  const bool separation = det_a < 0.0;
  if (collapse && separation) return Verdict::both;
  if (collapse) return Verdict::collapse;
  if (separation) return Verdict::separation;
  return Verdict::stable;
}

}  // namespace detail

/// Energy density as a function of the condensate densities under the
/// differentiation convention: unreduced fluctuation averages fixed at the
/// base point, total densities shifted one-to-one with the condensate ones.
/// This is the function whose exact gradient/Hessian are chemical_potentials
/// and generalized_couplings.
inline double energy_density_at_nc(const MixtureParams& base, const FluctuationSet& fl,
                                   std::array<double, 2> nc) {
  const double ntu11 = fl.nt11 * base.nc1;
  const double ntu22 = fl.nt22 * base.nc2;
  const double mtu11 = fl.mt11 * base.nc1;
  const double mtu22 = fl.mt22 * base.nc2;
  const double cross = std::sqrt(base.nc1 * base.nc2);
  const double ntu12 = fl.nt12 * cross;
  const double mtu12 = fl.mt12 * cross;

  MixtureParams p = base;
  p.nc1 = nc[0];
  p.nc2 = nc[1];
  p.n1 = base.n1 + (nc[0] - base.nc1);
  p.n2 = base.n2 + (nc[1] - base.nc2);
  const double new_cross = std::sqrt(nc[0] * nc[1]);
  FluctuationSet scaled;
  scaled.nt11 = ntu11 / nc[0];
  scaled.nt22 = ntu22 / nc[1];
  scaled.mt11 = mtu11 / nc[0];
  scaled.mt22 = mtu22 / nc[1];
  scaled.nt12 = ntu12 / new_cross;
  scaled.mt12 = mtu12 / new_cross;
  return energy_density(p, scaled);
}

/// Hessian stability analysis of the generalized curvature matrix, with an
/// optional finite-difference cross-check of the analytic derivatives.
/// Throws std::logic_error if the cross-check disagrees beyond 1e-4.
inline StabilityReport stability_check(const MixtureParams& p, const FluctuationSet& fl,
                                       bool with_fd_check = false) {
  require_valid(p);
  StabilityReport rep;
  rep.params = p;
  rep.fluctuations = fl;
  rep.couplings = generalized_couplings(p, fl);
  rep.trace_a = rep.couplings.g1 + rep.couplings.g2;
  rep.det_a = rep.couplings.g1 * rep.couplings.g2 - rep.couplings.g12 * rep.couplings.g12;
  rep.verdict = detail::classify(rep.couplings, rep.trace_a, rep.det_a);

  if (with_fd_check) {
    auto f = [&p, &fl](std::array<double, 2> nc) {
      return energy_density_at_nc(p, fl, nc);
    };
    const auto fd = fd_gradient_hessian(f, {p.nc1, p.nc2});
    const auto mu = chemical_potentials(p, fl);
    const double mu_scale = std::max({std::fabs(mu[0]), std::fabs(mu[1]), 1e-300});
    rep.fd.grad_rel_err =
        std::max(std::fabs(fd.grad[0] - mu[0]), std::fabs(fd.grad[1] - mu[1])) / mu_scale;
    const double an[3] = {rep.couplings.g1, rep.couplings.g12, rep.couplings.g2};
    const double num[3] = {fd.hess[0][0], fd.hess[0][1], fd.hess[1][1]};
    double h_scale = 1e-300;
    for (double a : an) h_scale = std::max(h_scale, std::fabs(a));
    double h_err = 0.0;
    for (int i = 0; i < 3; ++i) h_err = std::max(h_err, std::fabs(num[i] - an[i]));
    rep.fd.hess_rel_err = h_err / h_scale;
    rep.fd.run = true;
    rep.fd.agrees = rep.fd.grad_rel_err <= 1e-6 && rep.fd.hess_rel_err <= 1e-6;
    if (rep.fd.grad_rel_err > 1e-4 || rep.fd.hess_rel_err > 1e-4)
      throw std::logic_error(
          "stability_check: finite-difference cross-check disagrees with the analytic "
          "derivatives beyond 1e-4 (grad " + detail::num(rep.fd.grad_rel_err) +
          ", hess " + detail::num(rep.fd.hess_rel_err) + ")");
  }
  return rep;
}

}  // namespace mixstab
