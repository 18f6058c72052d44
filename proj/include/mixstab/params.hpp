#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixstab {

/// Normal-mode branch of the balanced mixture. The soft ("minus") branch is
/// the density mode whose gap closes at lambda = 1; the hard ("plus") branch
/// is the spin mode.
enum class Branch { minus, plus };

inline const char* to_string(Branch b) {
  return b == Branch::minus ? "minus" : "plus";
}

inline Branch branch_from_string(const std::string& s) {
  if (s == "minus") return Branch::minus;
  if (s == "plus") return Branch::plus;
  throw std::invalid_argument("branch must be \"minus\" or \"plus\", got \"" + s + "\"");
}

namespace detail {

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

/// Raw two-component mixture parameters. Couplings g_ij and densities are in
/// consistent 1D units; nc_i is the condensate part of the total density n_i.
struct MixtureParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double g11 = 1.0;
  double g22 = 1.0;
  double g12 = 0.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double nc1 = 1.0;
  double nc2 = 1.0;
  double hbar = 1.0;
};

/// Balanced reduction: m1 = m2 = m, g11 = g22 = g, n1 = n2 = n, nc1 = nc2 = nc,
/// lambda = g12 / g.
struct SymmetricParams {
  double m = 1.0;
  double g = 1.0;
  double lambda = 0.0;
  double n = 1.0;
  double nc = 1.0;
  double hbar = 1.0;
};

/// Reduced (dimensionless) anomalous and normal fluctuation averages,
/// nt_ij = ntilde_ij / sqrt(nc_i nc_j) and likewise for mt_ij.
struct FluctuationSet {
  double nt11 = 0.0;
  double nt22 = 0.0;
  double nt12 = 0.0;
  double mt11 = 0.0;
  double mt22 = 0.0;
  double mt12 = 0.0;

  /// Interspecies combination driving the generalized couplings.
  double f12() const { return nt12 + mt12; }

  /// True when both species carry identical intraspecies values.
  bool is_species_symmetric() const {
    return nt11 == nt22 && mt11 == mt22;
  }
};

/// Collects human-readable constraint violations; empty result means valid.
inline std::vector<std::string> validate(const MixtureParams& p) {
  std::vector<std::string> out;
  auto positive = [&out](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      out.push_back(std::string(name) + " must be positive and finite, got " + detail::num(v));
  };
  // Couplings may take any real value for stability analysis; spectrum and
  // fluctuation routines impose their own positivity requirements.
  auto finite = [&out](double v, const char* name) {
    if (!std::isfinite(v))
      out.push_back(std::string(name) + " must be finite, got " + detail::num(v));
  };
  positive(p.m1, "m1");
  positive(p.m2, "m2");
  finite(p.g11, "g11");
  finite(p.g22, "g22");
  positive(p.n1, "n1");
  positive(p.n2, "n2");
  positive(p.nc1, "nc1");
  positive(p.nc2, "nc2");
  positive(p.hbar, "hbar");
  if (!std::isfinite(p.g12))
    out.push_back("g12 must be finite, got " + detail::num(p.g12));
  if (p.nc1 > 0.0 && p.n1 > 0.0 && p.nc1 > p.n1)
    out.push_back("nc1 must not exceed n1, got nc1 = " + detail::num(p.nc1) +
                  ", n1 = " + detail::num(p.n1));
  if (p.nc2 > 0.0 && p.n2 > 0.0 && p.nc2 > p.n2)
    out.push_back("nc2 must not exceed n2, got nc2 = " + detail::num(p.nc2) +
                  ", n2 = " + detail::num(p.n2));
  return out;
}

inline void require_valid(const MixtureParams& p) {
  auto violations = validate(p);
  if (violations.empty()) return;
  std::string msg = "invalid mixture parameters:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

/// True when the two species are exactly interchangeable. Exact equality is
/// intentional: the balanced closed forms are not continuous extensions.
inline bool is_balanced(const MixtureParams& p) {
  return p.m1 == p.m2 && p.g11 == p.g22 && p.n1 == p.n2 && p.nc1 == p.nc2;
}

/// Balanced reduction; throws naming the first asymmetric field.
inline SymmetricParams reduce_symmetric(const MixtureParams& p) {
  require_valid(p);
  if (p.m1 != p.m2)
    throw std::invalid_argument("not balanced: m1 != m2 (" + detail::num(p.m1) + " vs " +
                                detail::num(p.m2) + ")");
  if (p.g11 != p.g22)
    throw std::invalid_argument("not balanced: g11 != g22 (" + detail::num(p.g11) + " vs " +
                                detail::num(p.g22) + ")");
  if (p.n1 != p.n2)
    throw std::invalid_argument("not balanced: n1 != n2 (" + detail::num(p.n1) + " vs " +
                                detail::num(p.n2) + ")");
  if (p.nc1 != p.nc2)
    throw std::invalid_argument("not balanced: nc1 != nc2 (" + detail::num(p.nc1) + " vs " +
                                detail::num(p.nc2) + ")");
  if (!(p.g11 > 0.0))
    throw std::invalid_argument("balanced reduction requires g11 = g22 > 0, got " +
                                detail::num(p.g11));
  return SymmetricParams{p.m1, p.g11, p.g12 / p.g11, p.n1, p.nc1, p.hbar};
}

/// Inverse of reduce_symmetric.
inline MixtureParams embed(const SymmetricParams& s) {
  MixtureParams p;
  p.m1 = p.m2 = s.m;
  p.g11 = p.g22 = s.g;
  p.g12 = s.lambda * s.g;
  p.n1 = p.n2 = s.n;
  p.nc1 = p.nc2 = s.nc;
  p.hbar = s.hbar;
  return p;
}

/// Beyond this the quasi-1D perturbative treatment is suspect.
inline constexpr double weak_coupling_gamma_limit = 0.3;

struct Gamma1d {
  double value = 0.0;
  /// Set when value > weak_coupling_gamma_limit; advisory, not an error.
  bool beyond_weak_coupling = false;
};

/// Quasi-1D coupling gamma = sqrt(m g / (hbar^2 n)); the perturbative small
/// parameter of every fluctuation closed form. Uses the total density n.
inline Gamma1d gamma_1d(double m, double g, double n, double hbar) {
  if (!(m > 0.0) || !(g > 0.0) || !(n > 0.0) || !(hbar > 0.0))
    throw std::domain_error("gamma_1d requires m, g, n, hbar > 0");
  double value = std::sqrt(m * g / (hbar * hbar * n));
  return Gamma1d{value, value > weak_coupling_gamma_limit};
}

inline Gamma1d gamma_1d(const SymmetricParams& s) {
  return gamma_1d(s.m, s.g, s.n, s.hbar);
}

}  // namespace mixstab
