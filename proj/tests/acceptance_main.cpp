// Acceptance gate: end-to-end contracts of the library, each checked at its
// stated tolerance. Prints one [PASS]/[FAIL] line per check and exits with
// the number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mixstab/mixstab.hpp"

using namespace mixstab;

namespace {

int failures = 0;

void run_check(const char* name, const std::function<bool(std::string&)>& fn) {
  std::string note;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = fn(note);
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] %s (%.1f ms)%s%s\n", ok ? "PASS" : "FAIL", name, ms,
              note.empty() ? "" : ": ", note.c_str());
  if (!ok) ++failures;
}

std::string num(double x) { return detail::num(x); }

}  // namespace

int main() {
  // 1. Closed-form depletion + pairing sum per unit gamma at the decoupled
  //    point: a_N - a_M = -0.116812 within 1e-6.
  run_check("lhy sum coefficient", [](std::string& note) {
    const auto pair = closed_form_intraspecies(Branch::minus, 0.0, 1.0);
    const double sum = pair.lhy_sum();
    note = "(nt + mt)/gamma = " + num(sum);
    return std::fabs(sum - (-0.116812)) <= 1e-6;
  });

  // 2. Infrared-safe quadrature anchor at unit parameters: -1/pi within 1e-9.
  run_check("infrared-safe quadrature anchor", [](std::string& note) {
    const SymmetricParams s;  // m = g = n = nc = hbar = 1, lambda = 0
    const auto r =
        integrate_ir_safe(s, Branch::minus, 0.0, FluctQuadratureSettings{}, 0.0);
    note = "value = " + num(r.value) + ", target = " + num(-1.0 / std::numbers::pi);
    return r.converged &&
           std::fabs(r.value - (-1.0 / std::numbers::pi)) <= 1e-9;
  });

  // 3. 4x4 solver against the analytic branches over 200 log-spaced kinetic
  //    energies and five couplings: 1e-10 relative, norms 1 within 1e-9.
  run_check("solver matches analytic branches", [](std::string& note) {
    double worst_rel = 0.0, worst_norm = 0.0;
    for (double lambda : {-0.99, -0.5, 0.0, 0.5, 0.99}) {
      SymmetricParams s;
      s.lambda = lambda;
      const MixtureParams p = embed(s);
      for (int i = 0; i < 200; ++i) {
        const double eps = std::pow(10.0, -4.0 + 8.0 * i / 199.0);
        const double k = std::sqrt(2.0 * eps);  // unit parameters
        const auto modes = solve_bdg(k, p, FluctuationSet{});
        if (modes.size() != 2) return false;
        // Ascending eigenvalues against the two analytic branches sorted the
        // same way; labels are not used because the pair is degenerate at
        // lambda = 0.
        double wm = dispersion_minus(eps, lambda, 0.0).real();
        double wp = dispersion_plus(eps, lambda).real();
        if (wm > wp) std::swap(wm, wp);
        worst_rel =
            std::max(worst_rel, std::fabs(modes[0].omega.real() - wm) / wm);
        worst_rel =
            std::max(worst_rel, std::fabs(modes[1].omega.real() - wp) / wp);
        worst_norm = std::max({worst_norm, std::fabs(modes[0].norm - 1.0),
                               std::fabs(modes[1].norm - 1.0)});
      }
    }
    note = "worst rel = " + num(worst_rel) + ", worst |norm-1| = " + num(worst_norm);
    return worst_rel <= 1e-10 && worst_norm <= 1e-9;
  });

  // 4. Finite-difference gradient/Hessian of the energy density against the
  //    analytic chemical potentials and generalized couplings over 100 draws.
  run_check("derivatives match finite differences", [](std::string& note) {
    std::mt19937 rng(424242u);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    std::uniform_real_distribution<double> S(-0.5, 0.5);
    std::uniform_real_distribution<double> F(-0.02, 0.02);
    double worst_g = 0.0, worst_h = 0.0;
    for (int i = 0; i < 100; ++i) {
      MixtureParams p;
      p.m1 = U(rng);
      p.m2 = U(rng);
      p.g11 = U(rng);
      p.g22 = U(rng);
      p.g12 = S(rng);
      p.n1 = U(rng);
      p.n2 = U(rng);
      p.nc1 = p.n1;
      p.nc2 = p.n2;
      p.hbar = U(rng);
      FluctuationSet fl;
      fl.nt11 = F(rng);
      fl.nt22 = F(rng);
      fl.nt12 = F(rng);
      fl.mt11 = F(rng);
      fl.mt22 = F(rng);
      fl.mt12 = F(rng);
      const auto rep = stability_check(p, fl, true);
      worst_g = std::max(worst_g, rep.fd.grad_rel_err);
      worst_h = std::max(worst_h, rep.fd.hess_rel_err);
    }
    note = "worst grad = " + num(worst_g) + ", worst hess = " + num(worst_h);
    return worst_g <= 1e-8 && worst_h <= 1e-6;
  });

  // 5. With zero fluctuations the verdict reduces to the classic conditions
  //    g11 > 0, g22 > 0, g11 g22 - g12^2 > 0 on a 101 x 101 grid.
  run_check("classic stability limit", [](std::string& note) {
    int disagreements = 0;
    for (int i = 0; i <= 100; ++i) {
      const double ratio = -1.5 + 3.0 * i / 100.0;
      for (int j = 0; j <= 100; ++j) {
        const double g = 2.0 * (j + 1) / 101.0;
        MixtureParams p;
        p.g11 = p.g22 = g;
        p.g12 = ratio * g;
        const auto rep = stability_check(p, FluctuationSet{});
        const bool classic = g > 0.0 && g * g - p.g12 * p.g12 > 0.0;
        if ((rep.verdict == Verdict::stable) != classic) ++disagreements;
      }
    }
    note = "disagreements = " + std::to_string(disagreements) + " / 10201";
    return disagreements == 0;
  });

  // 6. Soft-branch leading-order equilibrium ratios across 50 random
  //    parameter draws: density ratio 4 within 1e-9, depth ratio 16 within 1e-8.
  run_check("droplet equilibrium ratios", [](std::string& note) {
    std::mt19937 rng(77231u);
    std::uniform_real_distribution<double> U(0.5, 2.5);
    std::uniform_real_distribution<double> V(0.1, 1.0);
    double worst_n = 0.0, worst_e = 0.0;
    for (int i = 0; i < 50; ++i) {
      DropletConfig c;
      c.m = U(rng);
      c.hbar = U(rng);
      c.g = U(rng);
      c.dg = 0.02 * c.g * V(rng);
      c.branch = Branch::minus;
      c.form = EnergyForm::asymptotic;
      c.order = AsymptoticOrder::leading;
      c.coeff_mode = LhyCoeffMode::exact;
      const auto eq = equilibrium_pair(c);
      if (!eq.correlated.bounded || !eq.uncorrelated.bounded) return false;
      worst_n = std::max(worst_n, std::fabs(eq.ratio_n - 4.0));
      worst_e = std::max(worst_e, std::fabs(eq.ratio_e - 16.0));
    }
    note = "worst |ratio_n - 4| = " + num(worst_n) +
           ", worst |ratio_e - 16| = " + num(worst_e);
    return worst_n <= 1e-9 && worst_e <= 1e-8;
  });

  // 7. Rounded-coefficient anchors at g = 1, dg = 0.01: the numerical soft-
  //    branch minimum sits at 2464.0 within 0.1% of the closed form, and the
  //    hard-branch correlated/uncorrelated depth ratio is 1e-8 within 1%.
  run_check("rounded-coefficient droplet anchors", [](std::string& note) {
    DropletConfig c;  // m = hbar = g = 1, dg = 0.01
    c.branch = Branch::minus;
    c.form = EnergyForm::asymptotic;
    c.coeff_mode = LhyCoeffMode::rounded;
    const auto eq = equilibrium_pair(c);
    const auto cf = closed_form_equilibrium(c);
    if (!eq.correlated.bounded || !cf.available) return false;
    const double dev_cf = std::fabs(eq.correlated.n_star - cf.n_star) / cf.n_star;
    const double dev_anchor = std::fabs(eq.correlated.n_star - 2464.0) / 2464.0;

    DropletConfig h = c;
    h.branch = Branch::plus;
    const auto heq = equilibrium_pair(h);
    if (!heq.correlated.bounded || !heq.uncorrelated.bounded) return false;
    const double depth_dev = std::fabs(heq.ratio_e - 1e-8) / 1e-8;

    note = "n* = " + num(eq.correlated.n_star) + ", depth ratio = " +
           num(heq.ratio_e);
    return dev_cf <= 1e-3 && dev_anchor <= 1e-3 && depth_dev <= 1e-2;
  });

  // 8. The branch-exchange residual vanishes identically without interspecies
  //    fluctuations and matches the direct evaluation when they are present.
  run_check("branch symmetry breaking", [](std::string& note) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double eps = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
      for (double lambda = -0.9; lambda <= 0.95; lambda += 0.1)
        worst = std::max(worst, std::fabs(symmetry_breaking_gap(eps, lambda, 0.0)));
    }
    const double gap = symmetry_breaking_gap(1.0, 0.5, -0.3);
    const double direct = std::sqrt(4.3) - 2.0;  // shifted vs unshifted radicand
    note = "worst |gap| at f12 = 0: " + num(worst) + ", anchor gap = " + num(gap);
    return worst <= 1e-12 && gap > 0.0 && std::fabs(gap - direct) <= 1e-12;
  });

  // 9. At the droplet line dg = 0 the hard-branch correlated energy cancels
  //    identically while the soft-branch beyond-mean-field term doubles.
  run_check("branch cancellation and doubling at dg = 0", [](std::string& note) {
    DropletConfig hard;
    hard.dg = 0.0;
    hard.branch = Branch::plus;
    hard.form = EnergyForm::full;
    hard.correlated = true;
    for (double n : {1.0, 10.0, 100.0, 1e3, 1e6})
      if (droplet_energy(n, hard) != 0.0) return false;

    DropletConfig soft;
    soft.dg = 0.0;
    soft.branch = Branch::minus;
    soft.form = EnergyForm::asymptotic;
    soft.correlated = true;
    DropletConfig soft_unc = soft;
    soft_unc.correlated = false;
    double worst = 0.0;
    for (double n : {1.0, 10.0, 100.0, 1e3, 1e6}) {
      const double ec = droplet_energy(n, soft);
      const double eu = droplet_energy(n, soft_unc);
      worst = std::max(worst, std::fabs(ec / eu - 2.0));
    }
    note = "worst |corr/uncorr - 2| = " + num(worst);
    return worst <= 1e-12;
  });

  std::printf("%d/9 checks passed\n", 9 - failures);
  return failures;
}
