#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixstab/fluctuations.hpp"
#include "mixstab/minimize.hpp"
#include "mixstab/params.hpp"

namespace mixstab {

enum class EnergyForm { full, asymptotic };

inline const char* to_string(EnergyForm f) {
  return f == EnergyForm::full ? "full" : "asymptotic";
}

inline EnergyForm energy_form_from_string(const std::string& s) {
  if (s == "full") return EnergyForm::full;
  if (s == "asymptotic") return EnergyForm::asymptotic;
  throw std::invalid_argument("form must be \"full\" or \"asymptotic\"");
}

/// Truncation of the asymptotic branch energies. Leading order drops the
/// (1 - 3/4 dg/g) soft-branch correction and makes the closed-form minima and
/// the 4x / 16x correlated-to-uncorrelated ratios exact; first_order keeps it.
/// The hard branch has no such correction, so both orders coincide there.
enum class AsymptoticOrder { leading, first_order };

inline const char* to_string(AsymptoticOrder o) {
  return o == AsymptoticOrder::leading ? "leading" : "first_order";
}

inline AsymptoticOrder asymptotic_order_from_string(const std::string& s) {
  if (s == "leading") return AsymptoticOrder::leading;
  if (s == "first_order") return AsymptoticOrder::first_order;
  throw std::invalid_argument("order must be \"leading\" or \"first_order\"");
}

/// Balanced droplet configuration; dg = g + g12 is the mean-field detuning
/// (dg -> 0+ is the droplet regime). coeff_mode applies to the asymptotic
/// forms; the full form always evaluates its exact closed-form coefficients.
struct DropletConfig {
  double m = 1.0;
  double hbar = 1.0;
  double g = 1.0;
  double dg = 0.01;
  Branch branch = Branch::minus;
  bool correlated = true;
  EnergyForm form = EnergyForm::full;
  AsymptoticOrder order = AsymptoticOrder::leading;
  LhyCoeffMode coeff_mode = LhyCoeffMode::exact;
};

inline void require_valid(const DropletConfig& c) {
  if (!(c.m > 0.0) || !(c.hbar > 0.0) || !(c.g > 0.0))
    throw std::invalid_argument("droplet config requires m, hbar, g > 0");
  if (!(c.dg >= 0.0))
    throw std::invalid_argument("droplet config requires dg >= 0");
  if (c.branch == Branch::minus && c.dg > 2.0 * c.g)
    throw std::invalid_argument("soft branch requires dg <= 2 g (lambda <= 1)");
}

/// Soft diagnostics, never errors: the asymptotic forms assume dg/g << 1.
inline std::vector<std::string> droplet_warnings(const DropletConfig& c) {
  std::vector<std::string> w;
  if (c.form == EnergyForm::asymptotic && c.dg > 0.1 * c.g)
    w.push_back("asymptotic form outside droplet regime: dg/g = " +
                detail::num(c.dg / c.g) + " > 0.1");
  return w;
}

/// lambda = g12 / g implied by the detuning.
inline double droplet_lambda(const DropletConfig& c) { return c.dg / c.g - 1.0; }

namespace detail {

inline DropletConfig with_correlated(DropletConfig c, bool correlated) {
  c.correlated = correlated;
  return c;
}

}  // namespace detail

/// Untruncated branch energy density: mean field plus the closed-form
/// fluctuation terms evaluated at gamma(n) = sqrt(m g / (hbar^2 n)).
/// Correlated keeps the interspecies closure weight 2(1 -+ lambda) on the
/// linear fluctuation term; uncorrelated uses weight 2. The quadratic term
/// carries (1 + lambda) in both cases.
inline double energy_full(double n, const DropletConfig& c) {
  require_valid(c);
  if (!(n > 0.0)) throw std::invalid_argument("energy_full: requires n > 0");
  const double ratio = c.dg / c.g;  // 1 + lambda, exact at dg = 0
  const double wsq = c.branch == Branch::minus ? 2.0 - ratio : ratio;
  const double gamma = std::sqrt(c.m * c.g / (c.hbar * c.hbar * n));
  const double root = gamma * std::sqrt(wsq);
  const double nt = lhy_a_n() * root;
  const double mt = -lhy_a_m() * root;
  const double s = nt + mt;
  const double q = nt * nt + mt * mt;
  const double reduced = c.correlated ? ratio + 2.0 * wsq * s + ratio * q
                                      : ratio + 2.0 * s + q;
  return c.g * n * n * reduced;
}

namespace detail {

// Slope b of the asymptotic form E = dg n^2 - b n^(3/2).
inline double asymptotic_slope(const DropletConfig& c, AsymptoticOrder order) {
  const double gamma_c = lhy_coefficient(c.coeff_mode) * std::sqrt(c.m) / c.hbar;
  const double x = c.dg / c.g;
  if (c.branch == Branch::minus) {
    const double base = c.correlated ? std::sqrt(8.0) : std::sqrt(2.0);
    const double corr = order == AsymptoticOrder::first_order
                            ? (c.correlated ? 1.0 - 0.75 * x : 1.0 - 0.25 * x)
                            : 1.0;
    return base * corr * gamma_c * std::pow(c.g, 1.5);
  }
  return c.correlated ? gamma_c * std::pow(c.dg, 1.5)
                      : gamma_c * c.g * std::sqrt(c.dg);
}

}  // namespace detail

/// Small-detuning branch energies, E = dg n^2 - b n^(3/2) with the branch and
/// correlation dependent slope b. Evaluates at dg = 0 too (pure attraction on
/// the soft branch); the minimization layer reports the unbounded landscape.
inline double energy_asymptotic(double n, const DropletConfig& c) {
  require_valid(c);
  if (!(n > 0.0)) throw std::invalid_argument("energy_asymptotic: requires n > 0");
  const double b = detail::asymptotic_slope(c, c.order);
  return c.dg * n * n - b * n * std::sqrt(n);
}

inline double droplet_energy(double n, const DropletConfig& c) {
  return c.form == EnergyForm::full ? energy_full(n, c) : energy_asymptotic(n, c);
}

struct ClosedFormMinimum {
  bool available = false;
  double n_star = 0.0;
  double e_star = 0.0;
};

/// Leading-order stationary point of E = dg n^2 - b0 n^(3/2):
/// n* = (3 b0 / 4 dg)^2, E* = -(1/3) dg n*^2. On the soft branch this is the
/// (9/2) gamma^2 g^3 / dg^2 equilibrium density.
inline ClosedFormMinimum closed_form_equilibrium(const DropletConfig& c) {
  require_valid(c);
  ClosedFormMinimum out;
  const double b0 = detail::asymptotic_slope(c, AsymptoticOrder::leading);
  if (!(c.dg > 0.0) || !(b0 > 0.0)) return out;
  out.available = true;
  out.n_star = std::pow(3.0 * b0 / (4.0 * c.dg), 2);
  out.e_star = -c.dg * out.n_star * out.n_star / 3.0;
  return out;
}

struct EquilibriumPoint {
  bool bounded = false;       // an interior minimum exists
  std::string note;           // set when not bounded
  double n_star = 0.0;
  double e_star = 0.0;
  MinimizeResult search{};
  ClosedFormMinimum closed_form{};
  double closed_form_rel_dev = 0.0;  // |n* - n_cf| / n_cf
};

namespace detail {

// Analytic d/dn and d2/dn2 of the configured energy form. Both forms are
// polynomials in sqrt(n), so Newton polishing of the stationary point is
// exact to machine precision.
struct EnergyDerivatives {
  double first = 0.0;
  double second = 0.0;
};

inline EnergyDerivatives droplet_energy_derivatives(double n, const DropletConfig& c) {
  const double rn = std::sqrt(n);
  if (c.form == EnergyForm::asymptotic) {
    const double b = asymptotic_slope(c, c.order);
    return {2.0 * c.dg * n - 1.5 * b * rn, 2.0 * c.dg - 0.75 * b / rn};
  }
  const double ratio = c.dg / c.g;
  const double wsq = c.branch == Branch::minus ? 2.0 - ratio : ratio;
  const double w = std::sqrt(wsq);
  const double q = std::sqrt(c.m * c.g) / c.hbar;  // gamma(n) = q / sqrt(n)
  const double diff = lhy_a_n() - lhy_a_m();
  const double sq = lhy_a_n() * lhy_a_n() + lhy_a_m() * lhy_a_m();
  const double bc = c.correlated ? 2.0 * wsq * w * diff : 2.0 * w * diff;
  const double dc = (c.correlated ? ratio : 1.0) * sq * wsq;
  // E = g [ratio n^2 + bc q n^(3/2) + dc q^2 n]
  return {c.g * (2.0 * ratio * n + 1.5 * bc * q * rn + dc * q * q),
          c.g * (2.0 * ratio + 0.75 * bc * q / rn)};
}

}  // namespace detail

/// Locates the interior minimum of the configured energy form: bracketed
/// golden/parabolic search (default bracket [1e-3, 10] x the closed-form
/// prediction), then Newton polish on the analytic derivative. Landscapes
/// without an interior minimum (dg = 0, or no fluctuation attraction, or a
/// monotone caller bracket) yield an unbounded/no-droplet result, never an
/// exception.
inline EquilibriumPoint equilibrium(
    const DropletConfig& c,
    std::optional<std::pair<double, double>> bracket = std::nullopt) {
  require_valid(c);
  if (bracket && !(bracket->first > 0.0 && bracket->second > bracket->first))
    throw std::invalid_argument("equilibrium: bracket requires 0 < lo < hi");

  EquilibriumPoint pt;
  pt.closed_form = closed_form_equilibrium(c);
  if (!pt.closed_form.available && !bracket) {
    pt.note = c.dg > 0.0 ? "no fluctuation attraction on this branch (no droplet)"
                         : "dg = 0: energy unbounded from below, no droplet minimum";
    return pt;
  }
  const double lo = bracket ? bracket->first : 1e-3 * pt.closed_form.n_star;
  const double hi = bracket ? bracket->second : 10.0 * pt.closed_form.n_star;
  auto e = [&c](double n) { return droplet_energy(n, c); };
  pt.search = minimize_scalar(e, lo, hi, 1e-12);
  if (pt.search.at_boundary) {
    pt.note = "no interior minimum in [" + detail::num(lo) + ", " + detail::num(hi) +
              "]: unbounded or no droplet on this branch";
    return pt;
  }
  double n = pt.search.x_star;
  for (int it = 0; it < 12; ++it) {
    const auto d = detail::droplet_energy_derivatives(n, c);
    if (!(d.second > 0.0)) break;
    const double next = std::min(std::max(n - d.first / d.second, lo), hi);
    const bool done = std::fabs(next - n) <= 1e-16 * n;
    n = next;
    if (done) break;
  }
  if (!(detail::droplet_energy_derivatives(n, c).second > 0.0)) {
    pt.note = "stationary point is not convex: no droplet minimum";
    return pt;
  }
  pt.bounded = true;
  pt.n_star = n;
  pt.e_star = e(n);
  if (pt.closed_form.available)
    pt.closed_form_rel_dev =
        std::fabs(n - pt.closed_form.n_star) / pt.closed_form.n_star;
  return pt;
}

struct EquilibriumResult {
  EquilibriumPoint correlated{};
  EquilibriumPoint uncorrelated{};
  /// Correlated over uncorrelated; meaningful when both points are bounded.
  double ratio_n = 0.0;
  double ratio_e = 0.0;
};

/// Runs equilibrium for both the correlated and uncorrelated forms of the
/// same configuration and reports the density and depth ratios.
inline EquilibriumResult equilibrium_pair(const DropletConfig& c) {
  EquilibriumResult res;
  res.correlated = equilibrium(detail::with_correlated(c, true));
  res.uncorrelated = equilibrium(detail::with_correlated(c, false));
  if (res.correlated.bounded && res.uncorrelated.bounded) {
    res.ratio_n = res.correlated.n_star / res.uncorrelated.n_star;
    res.ratio_e = res.correlated.e_star / res.uncorrelated.e_star;
  }
  return res;
}

struct CurveGrid {
  double lo = 1.0;
  double hi = 6000.0;
  int points = 600;
  bool log_spacing = false;
};

struct CurvePoint {
  double n = 0.0;
  double e_correlated = 0.0;
  double e_uncorrelated = 0.0;
};

struct DropletCurve {
  DropletConfig config{};
  CurveGrid grid{};
  std::vector<CurvePoint> points;
  /// Present when a minimum exists and falls inside the sampled window.
  std::optional<EquilibriumResult> minima;
};

/// Samples both the correlated and uncorrelated energies over the grid,
/// sorted by n, and annotates the interior minima when they fall inside the
/// window. A single-point grid degenerates to one sample with no annotation.
inline DropletCurve figure_curve(const DropletConfig& c, const CurveGrid& grid) {
  require_valid(c);
  if (!(grid.lo > 0.0) || !(grid.hi >= grid.lo) || grid.points < 1)
    throw std::invalid_argument("figure_curve: requires 0 < lo <= hi and points >= 1");
  if (grid.points > 1 && !(grid.hi > grid.lo))
    throw std::invalid_argument("figure_curve: requires lo < hi for a multi-point grid");

  DropletCurve curve;
  curve.config = c;
  curve.grid = grid;
  curve.points.reserve(static_cast<std::size_t>(grid.points));
  const double llo = std::log(grid.lo), lhi = std::log(grid.hi);
  for (int i = 0; i < grid.points; ++i) {
    const double t = grid.points == 1 ? 0.0 : double(i) / double(grid.points - 1);
    const double n = grid.log_spacing ? std::exp(llo + t * (lhi - llo))
                                      : grid.lo + t * (grid.hi - grid.lo);
    curve.points.push_back({n, droplet_energy(n, detail::with_correlated(c, true)),
                            droplet_energy(n, detail::with_correlated(c, false))});
  }

  if (grid.points > 1 && c.dg > 0.0) {
    const auto eq = equilibrium_pair(c);
    const bool corr_in = eq.correlated.bounded && eq.correlated.n_star >= grid.lo &&
                         eq.correlated.n_star <= grid.hi;
    const bool unc_in = eq.uncorrelated.bounded && eq.uncorrelated.n_star >= grid.lo &&
                        eq.uncorrelated.n_star <= grid.hi;
    if (corr_in || unc_in) curve.minima = eq;
  }
  return curve;
}

}  // namespace mixstab
