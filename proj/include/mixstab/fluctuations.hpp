#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mixstab/bogoliubov.hpp"
#include "mixstab/params.hpp"
#include "mixstab/quadrature.hpp"

namespace mixstab {

/// Coefficient of the normal intraspecies average: nt = a_N gamma sqrt(gap).
/// Always computed from the defining expression, never from rounded decimals.
inline double lhy_a_n() {
  return (1.0 - std::asinh(1.0) / std::sqrt(2.0)) / (2.0 * std::numbers::pi);
}

/// Coefficient of the anomalous intraspecies average: mt = -a_M gamma sqrt(gap).
inline double lhy_a_m() { return std::sqrt(2.0) / 8.0; }

enum class LhyCoeffMode { exact, rounded };

inline const char* to_string(LhyCoeffMode m) {
  return m == LhyCoeffMode::exact ? "exact" : "rounded";
}

inline LhyCoeffMode lhy_coeff_mode_from_string(const std::string& s) {
  if (s == "exact") return LhyCoeffMode::exact;
  if (s == "rounded") return LhyCoeffMode::rounded;
  throw std::invalid_argument("lhy coefficient mode must be \"exact\" or \"rounded\"");
}

/// Positive magnitude C of the beyond-mean-field coefficient gamma_LHY =
/// C sqrt(m)/hbar; exact mode evaluates 2 (a_M - a_N), rounded mode uses the
/// conventional 0.234.
inline double lhy_coefficient(LhyCoeffMode mode) {
  return mode == LhyCoeffMode::exact ? 2.0 * (lhy_a_m() - lhy_a_n()) : 0.234;
}

struct FluctuationPair {
  double nt = 0.0;
  double mt = 0.0;
  double lhy_sum() const { return nt + mt; }
};

/// Closed forms at an arbitrary dimensionless soft/hard gap c >= 0:
/// nt = a_N gamma sqrt(c), mt = -a_M gamma sqrt(c).
inline FluctuationPair closed_form_at_gap(double c, double gamma1d) {
  if (!(gamma1d >= 0.0))
    throw std::invalid_argument("closed_form_at_gap: gamma1d must be >= 0");
  if (!(c >= 0.0))
    throw std::domain_error("closed_form_at_gap: gap must be >= 0 (branch unstable)");
  const double root = std::sqrt(c);
  return FluctuationPair{lhy_a_n() * gamma1d * root, -lhy_a_m() * gamma1d * root};
}

/// Quasi-1D intraspecies fluctuation averages of the selected branch,
/// nt = a_N gamma sqrt(1 -+ lambda), mt = -a_M gamma sqrt(1 -+ lambda).
/// Both vanish at the branch edge |lambda| = 1 and scale linearly in gamma.
inline FluctuationPair closed_form_intraspecies(Branch b, double lambda,
                                                double gamma1d) {
  const double c = b == Branch::minus ? 1.0 - lambda : 1.0 + lambda;
  if (c < 0.0)
    throw std::domain_error("closed_form_intraspecies: lambda outside the branch domain");
  return closed_form_at_gap(c, gamma1d);
}

/// Correlated closure: on the soft branch the interspecies averages mirror the
/// intraspecies ones with a sign flip, nt12 = -nt, mt12 = -mt; the hard branch
/// closes without the flip.
inline FluctuationSet branch_closure(Branch b, double nt, double mt) {
  const double s = b == Branch::minus ? -1.0 : 1.0;
  FluctuationSet fl;
  fl.nt11 = fl.nt22 = nt;
  fl.mt11 = fl.mt22 = mt;
  fl.nt12 = s * nt;
  fl.mt12 = s * mt;
  return fl;
}

inline FluctuationSet branch_closure(Branch b, const FluctuationPair& p) {
  return branch_closure(b, p.nt, p.mt);
}

/// Healing wavenumber sqrt(4 m g nc) / hbar; the natural scale of the
/// fluctuation integrands and the mapping scale of the semi-infinite rule.
inline double healing_wavenumber(const SymmetricParams& s) {
  return std::sqrt(4.0 * s.m * s.g * s.nc) / s.hbar;
}

struct FluctQuadratureSettings {
  QuadratureSettings quad{};
  /// Infrared cutoff for the individually divergent nt and mt; must be > 0.
  double k_min = 0.0;
  /// Ultraviolet cutoff; infinite means the mapped semi-infinite rule.
  double k_max = std::numeric_limits<double>::infinity();
  /// k_B T in the energy units of g nc. The T > 0 Bose factor is implemented
  /// but not validated against published results.
  double temperature = 0.0;
};

struct IrDiagnostics {
  double k_min = 0.0;
  double nt_at_kmin = 0.0;
  double nt_at_2kmin = 0.0;
  double mt_at_kmin = 0.0;
  double mt_at_2kmin = 0.0;
  /// Infrared drift measured by halving the resolved window.
  double nt_sensitivity = 0.0;
  double mt_sensitivity = 0.0;
};

struct QuadratureFluctuations {
  double nt = 0.0;       // at the caller's k_min
  double mt = 0.0;
  double sum_ir_safe = 0.0;  // cutoff-free combination, always from k_min = 0
  IrDiagnostics ir{};
  double max_error_bound = 0.0;
  std::int64_t evaluations = 0;
  bool converged = false;
};

namespace detail {

struct FluctIntegrands {
  SymmetricParams sym;
  double gap = 0.0;
  double temperature = 0.0;

  double eps(double k) const {
    return sym.hbar * sym.hbar * k * k / (2.0 * sym.m * sym.g * sym.nc);
  }
  double bose(double omega_tilde) const {
    if (temperature <= 0.0) return 0.0;
    const double x = sym.g * sym.nc * omega_tilde / temperature;
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
  }
  // Species factor 2 over 2 pi nc: reduced averages sum both components.
  double pref() const { return 1.0 / (std::numbers::pi * sym.nc); }

  double nt_integrand(double k) const {
    const auto p = amplitude_products(eps(k), gap);
    const double f = bose(p.omega);
    return pref() * (f * p.u2 + (1.0 + f) * p.v2);
  }
  double mt_integrand(double k) const {
    const auto p = amplitude_products(eps(k), gap);
    const double f = bose(p.omega);
    return -pref() * (1.0 + 2.0 * f) * p.uv;
  }
  // v^2 - u v is infrared finite (-> -1/2 as k -> 0); at T > 0 the thermal
  // piece f (u - v)^2 is finite too.
  double ir_safe_integrand(double k) const {
    if (k == 0.0) return pref() * -0.5;
    const auto p = amplitude_products(eps(k), gap);
    const double f = bose(p.omega);
    return pref() * (p.v2_minus_uv + f * p.umv_sq);
  }
};

}  // namespace detail

/// Cutoff-free combination (1/2pi) Int 2 (v^2 - uv + thermal) dk / nc from
/// k_min upward; exposed separately so cutoff independence can be probed.
inline QuadratureResult integrate_ir_safe(const SymmetricParams& sym, Branch b,
                                          double f12,
                                          const FluctQuadratureSettings& settings,
                                          double k_min = 0.0) {
  const double c = branch_gap(b, sym.lambda, f12);
  if (c < 0.0)
    throw std::domain_error("integrate_ir_safe: branch unstable (negative gap)");
  detail::FluctIntegrands fi{sym, c, settings.temperature};
  return integrate_semi_infinite([&fi](double k) { return fi.ir_safe_integrand(k); },
                                 k_min, healing_wavenumber(sym), settings.quad,
                                 settings.k_max);
}

/// Direct quadrature of the branch fluctuation averages. nt and mt are
/// individually infrared divergent, so they require k_min > 0 and are
/// reported together with their measured k_min sensitivity; sum_ir_safe is
/// the cutoff-independent anchor (equal to -sqrt(m g c / nc)/(pi hbar) at
/// T = 0). The closed forms remain the normative values; this path is a
/// diagnostic of the engine and of the infrared structure.
inline QuadratureFluctuations quadrature_intraspecies(
    const SymmetricParams& sym, Branch b, double f12,
    const FluctQuadratureSettings& settings) {
  if (!(settings.k_min > 0.0))
    throw std::invalid_argument(
        "quadrature_intraspecies: k_min must be > 0 (nt, mt are infrared divergent)");
  const double c = branch_gap(b, sym.lambda, f12);
  if (c < 0.0)
    throw std::domain_error("quadrature_intraspecies: branch unstable (negative gap)");

  detail::FluctIntegrands fi{sym, c, settings.temperature};
  const double k0 = healing_wavenumber(sym);

  auto run = [&](auto&& f, double kmin) {
    return integrate_semi_infinite(f, kmin, k0, settings.quad, settings.k_max);
  };
  auto nt_f = [&fi](double k) { return fi.nt_integrand(k); };
  auto mt_f = [&fi](double k) { return fi.mt_integrand(k); };

  const auto nt1 = run(nt_f, settings.k_min);
  const auto nt2 = run(nt_f, 2.0 * settings.k_min);
  const auto mt1 = run(mt_f, settings.k_min);
  const auto mt2 = run(mt_f, 2.0 * settings.k_min);
  const auto ir = integrate_ir_safe(sym, b, f12, settings, 0.0);

  QuadratureFluctuations out;
  out.nt = nt1.value;
  out.mt = mt1.value;
  out.sum_ir_safe = ir.value;
  out.ir.k_min = settings.k_min;
  out.ir.nt_at_kmin = nt1.value;
  out.ir.nt_at_2kmin = nt2.value;
  out.ir.mt_at_kmin = mt1.value;
  out.ir.mt_at_2kmin = mt2.value;
  out.ir.nt_sensitivity = nt1.value - nt2.value;
  out.ir.mt_sensitivity = mt1.value - mt2.value;
  for (const auto& r : {nt1, nt2, mt1, mt2, ir}) {
    out.max_error_bound = std::max(out.max_error_bound, r.error_bound);
    out.evaluations += r.evaluations;
  }
  out.converged = nt1.converged && nt2.converged && mt1.converged && mt2.converged &&
                  ir.converged;
  return out;
}

enum class LoopStatus { converged, max_iter_exceeded, spectrum_unstable };

inline const char* to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::converged: return "converged";
    case LoopStatus::max_iter_exceeded: return "max_iter_exceeded";
    default: return "spectrum_unstable";
  }
}

struct SelfConsistentResult {
  FluctuationSet set{};
  int iterations = 0;
  double residual = 0.0;  // max |target - iterate| at exit
  double gap = 0.0;       // final dimensionless branch gap
  LoopStatus status = LoopStatus::converged;
};

/// Damped fixed-point cycle closing fluctuations on the spectrum: the
/// intraspecies closed forms are evaluated at the current soft-branch gap
/// c(f12) = (1 - lambda) - lambda f12 (the hard branch has no feedback), then
/// the branch closure provides the next interspecies averages. gamma = 0 and
/// lambda = 0 both converge to the single-pass closed form. An unstable
/// spectrum mid-iteration is reported along with the last stable iterate.
inline SelfConsistentResult self_consistent_loop(const SymmetricParams& sym, Branch b,
                                                 double damping = 0.5,
                                                 double tol = 1e-10,
                                                 int max_iter = 200) {
  if (!(damping > 0.0) || !(damping <= 1.0))
    throw std::invalid_argument("self_consistent_loop: damping must be in (0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("self_consistent_loop: tol must be > 0");
  const double gamma = gamma_1d(sym).value;

  SelfConsistentResult res;
  FluctuationSet cur{};
  for (int it = 1; it <= max_iter; ++it) {
    const double c = branch_gap(b, sym.lambda, cur.f12());
    res.iterations = it;
    res.gap = c;
    if (c < 0.0) {
      res.set = cur;
      res.status = LoopStatus::spectrum_unstable;
      return res;
    }
    const auto pair = closed_form_at_gap(c, gamma);
    const FluctuationSet target = branch_closure(b, pair);
    double change = 0.0;
    auto acc = [&change](double t, double c0) {
      change = std::max(change, std::fabs(t - c0));
    };
    acc(target.nt11, cur.nt11);
    acc(target.nt12, cur.nt12);
    acc(target.mt11, cur.mt11);
    acc(target.mt12, cur.mt12);
    res.residual = change;
    if (change <= tol) {
      res.set = cur;
      res.status = LoopStatus::converged;
      return res;
    }
    auto mix = [damping](double c0, double t) { return c0 + damping * (t - c0); };
    cur.nt11 = cur.nt22 = mix(cur.nt11, target.nt11);
    cur.mt11 = cur.mt22 = mix(cur.mt11, target.mt11);
    cur.nt12 = mix(cur.nt12, target.nt12);
    cur.mt12 = mix(cur.mt12, target.mt12);
  }
  res.set = cur;
  res.status = LoopStatus::max_iter_exceeded;
  return res;
}

}  // namespace mixstab
