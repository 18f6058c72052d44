#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mixstab/bogoliubov.hpp"
#include "mixstab/droplet.hpp"
#include "mixstab/fluctuations.hpp"
#include "mixstab/minimize.hpp"
#include "mixstab/params.hpp"
#include "mixstab/quadrature.hpp"
#include "mixstab/stability.hpp"

namespace mixstab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline CheckResult check_abs(const std::string& name, double measured, double expected,
                             double tol) {
  const double err = std::fabs(measured - expected);
  CheckResult r{name, err <= tol, ""};
  r.detail = "measured " + num(measured) + ", expected " + num(expected) + ", |err| " +
             num(err) + " vs tol " + num(tol);
  return r;
}

inline CheckResult check_rel(const std::string& name, double measured, double expected,
                             double rel_tol) {
  const double err = std::fabs(measured - expected);
  const double tol = rel_tol * std::fabs(expected);
  CheckResult r{name, err <= tol, ""};
  r.detail = "measured " + num(measured) + ", expected " + num(expected) +
             ", |err| " + num(err) + " vs tol " + num(tol);
  return r;
}

inline CheckResult check_bound(const std::string& name, double measured, double bound) {
  CheckResult r{name, measured <= bound, ""};
  r.detail = "measured " + num(measured) + " vs bound " + num(bound);
  return r;
}

}  // namespace detail

/// Independent oracle suite: quadrature against antiderivatives, minimization
/// against stationarity, the 4x4 solver against the analytic branches, the
/// analytic derivatives against finite differences, and the closed-form
/// droplet/stability anchors. Everything here is cheap enough for a CI gate.
inline std::vector<CheckResult> run_validation() {
  std::vector<CheckResult> out;

  {  // Quadrature engine vs antiderivative oracles.
    const auto exp_int =
        integrate_semi_infinite([](double k) { return std::exp(-k); }, 0.0, 1.0);
    out.push_back(detail::check_rel("quadrature: exp tail", exp_int.value, 1.0, 1e-10));

    const auto lorentz = integrate_semi_infinite(
        [](double k) { return 1.0 / (k * k + 16.0); }, 0.0, 4.0);
    out.push_back(detail::check_rel("quadrature: lorentzian", lorentz.value,
                                    std::numbers::pi / 8.0, 1e-10));

    SymmetricParams unit{};
    const auto ir = integrate_ir_safe(unit, Branch::minus, 0.0,
                                      FluctQuadratureSettings{});
    out.push_back(detail::check_abs("quadrature: infrared-safe anchor", ir.value,
                                    -1.0 / std::numbers::pi, 1e-9));
  }

  {  // Closed-form fluctuation sum.
    const auto pair = closed_form_intraspecies(Branch::minus, 0.0, 1.0);
    out.push_back(
        detail::check_abs("fluctuations: lhy sum", pair.lhy_sum(), -0.116812, 1e-6));
    out.push_back(detail::check_abs("fluctuations: lhy sum identity", pair.lhy_sum(),
                                    lhy_a_n() - lhy_a_m(), 1e-15));
  }

  {  // Minimizer against stationarity.
    const auto quadmin = minimize_scalar(
        [](double n) { return (n - 3.0) * (n - 3.0); }, 0.0, 10.0, 1e-12);
    out.push_back(detail::check_abs("minimize: quadratic", quadmin.x_star, 3.0, 1e-8));

    const double b = std::sqrt(8.0) * 0.234;
    const double n_cf = std::pow(3.0 * b / (4.0 * 0.01), 2);
    const auto drop = minimize_scalar(
        [b](double n) { return 0.01 * n * n - b * n * std::sqrt(n); }, 1.0, 1e5,
        1e-12);
    out.push_back(
        detail::check_rel("minimize: droplet stationarity", drop.x_star, n_cf, 1e-7));
  }

  {  // 4x4 solver against the analytic branches (zero fluctuations).
    double max_rel = 0.0, max_norm = 0.0;
    for (double lambda : {-0.5, 0.0, 0.5}) {
      SymmetricParams sym{};
      sym.lambda = lambda;
      const MixtureParams p = embed(sym);
      for (int i = 0; i < 20; ++i) {
        const double eps = std::pow(10.0, -3.0 + 6.0 * i / 19.0);
        const double k = std::sqrt(2.0 * eps);  // unit m, g, nc, hbar
        const auto modes = solve_bdg(k, p, FluctuationSet{});
        const double w_minus = std::real(dispersion_minus(eps, lambda, 0.0));
        const double w_plus = std::real(dispersion_plus(eps, lambda));
        if (modes.size() != 2) {
          max_rel = 1.0;
          continue;
        }
        const double lo = std::min(w_minus, w_plus), hi = std::max(w_minus, w_plus);
        max_rel = std::max(max_rel,
                           std::fabs(std::real(modes[0].omega) - lo) / std::fabs(lo));
        max_rel = std::max(max_rel,
                           std::fabs(std::real(modes[1].omega) - hi) / std::fabs(hi));
        max_norm = std::max({max_norm, std::fabs(modes[0].norm - 1.0),
                             std::fabs(modes[1].norm - 1.0)});
      }
    }
    out.push_back(detail::check_bound("bogoliubov: branches vs 4x4", max_rel, 1e-10));
    out.push_back(detail::check_bound("bogoliubov: mode norms", max_norm, 1e-9));
  }

  {  // Analytic derivatives vs finite differences.
    std::mt19937 gen(20240811u);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    std::uniform_real_distribution<double> S(-0.5, 0.5);
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int i = 0; i < 5; ++i) {
      MixtureParams p;
      p.m1 = U(gen);
      p.m2 = U(gen);
      p.g11 = U(gen);
      p.g22 = U(gen);
      p.g12 = S(gen);
      p.nc1 = U(gen);
      p.nc2 = U(gen);
      p.n1 = p.nc1 * (1.0 + 0.05 * U(gen));
      p.n2 = p.nc2 * (1.0 + 0.05 * U(gen));
      FluctuationSet fl;
      fl.nt11 = 0.02 * S(gen);
      fl.nt22 = 0.02 * S(gen);
      fl.nt12 = 0.02 * S(gen);
      fl.mt11 = 0.02 * S(gen);
      fl.mt22 = 0.02 * S(gen);
      fl.mt12 = 0.02 * S(gen);
      const auto rep = stability_check(p, fl, true);
      worst_grad = std::max(worst_grad, rep.fd.grad_rel_err);
      worst_hess = std::max(worst_hess, rep.fd.hess_rel_err);
    }
    out.push_back(
        detail::check_bound("stability: fd gradient agreement", worst_grad, 1e-8));
    out.push_back(
        detail::check_bound("stability: fd hessian agreement", worst_hess, 1e-6));
  }

  {  // Classic zero-fluctuation verdicts.
    MixtureParams p;
    p.g12 = 0.5;
    bool ok = true;
    ok = ok && stability_check(p, FluctuationSet{}).verdict == Verdict::stable;
    p.g12 = 1.2;
    ok = ok && stability_check(p, FluctuationSet{}).verdict == Verdict::separation;
    CheckResult r{"stability: classic verdicts", ok,
                  ok ? "miscible and immiscible cases classified"
                     : "classic verdict mismatch"};
    out.push_back(r);
  }

  {  // Generalized-coupling anchor.
    MixtureParams p;
    p.g12 = 0.5;
    FluctuationSet fl;
    fl.nt12 = -0.1;
    fl.mt12 = -0.1;
    const auto rep = stability_check(p, fl);
    out.push_back(detail::check_abs("stability: generalized trace", rep.trace_a, 2.1,
                                    1e-12));
    out.push_back(
        detail::check_abs("stability: generalized det", rep.det_a, 0.9, 1e-12));
  }

  {  // Branch-symmetry residual.
    double worst = 0.0;
    for (double eps : {1e-3, 1e-1, 1.0, 1e2})
      for (double lambda : {-0.9, -0.3, 0.0, 0.3, 0.9})
        worst = std::max(worst, std::fabs(symmetry_breaking_gap(eps, lambda, 0.0)));
    out.push_back(
        detail::check_bound("bogoliubov: symmetry gap at f12 = 0", worst, 1e-12));
    out.push_back(detail::check_abs(
        "bogoliubov: symmetry gap anchor", symmetry_breaking_gap(1.0, 0.5, -0.3),
        std::sqrt(4.3) - 2.0, 1e-12));
  }

  {  // Droplet ratio identities (leading-order asymptotics).
    DropletConfig c;
    c.m = 0.7;
    c.hbar = 1.3;
    c.g = 2.1;
    c.dg = 0.013;
    c.form = EnergyForm::asymptotic;
    const auto eq = equilibrium_pair(c);
    out.push_back(detail::check_abs("droplet: density ratio", eq.ratio_n, 4.0, 1e-9));
    out.push_back(detail::check_abs("droplet: depth ratio", eq.ratio_e, 16.0, 1e-8));
  }

  {  // Exact cancellation at the droplet line dg = 0.
    DropletConfig c;
    c.dg = 0.0;
    c.branch = Branch::plus;
    double worst = 0.0;
    for (double n : {1.0, 10.0, 100.0, 1000.0})
      worst = std::max(worst, std::fabs(energy_full(n, c)));
    out.push_back(
        detail::check_bound("droplet: hard-branch cancellation", worst, 1e-12));

    c.branch = Branch::minus;
    c.form = EnergyForm::asymptotic;
    double worst_ratio = 0.0;
    for (double n : {1.0, 10.0, 100.0}) {
      const double corr = energy_asymptotic(n, detail::with_correlated(c, true));
      const double unc = energy_asymptotic(n, detail::with_correlated(c, false));
      worst_ratio = std::max(worst_ratio, std::fabs(corr / unc - 2.0));
    }
    out.push_back(
        detail::check_bound("droplet: doubled soft-branch term", worst_ratio, 1e-12));
  }

  return out;
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

}  // namespace mixstab
