// mixstab: command-line front-end for the binary-mixture stability toolkit.
// Subcommands: spectrum, fluct, stability, droplet, scan, validate.
// Exit codes: 0 success, 1 usage, 2 invalid configuration, 3 numerical
// failure, 4 validation failure. Errors are machine-readable JSON on stderr.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mixstab/mixstab.hpp"

namespace {

using nlohmann::json;
namespace ms = mixstab;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit_error(int code, const std::string& kind, const std::string& message) {
  const std::string doc = ms::io::jobject({ms::io::jfield(
      "error", ms::io::jobject({ms::io::jfield("code", ms::io::jint(code)),
                                ms::io::jfield("kind", ms::io::jstr(kind)),
                                ms::io::jfield("message", ms::io::jstr(message))}))});
  std::fputs((doc + "\n").c_str(), stderr);
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  ms::io::write_text_file(path, content);
}

// ---------------------------------------------------------------------------
// Parameter resolution: defaults, then JSON config file, then flags.
// ---------------------------------------------------------------------------

struct ParamCli {
  std::string config_path;
  double m1 = 0, m2 = 0, g11 = 0, g22 = 0, g12 = 0;
  double n1 = 0, n2 = 0, nc1 = 0, nc2 = 0, hbar = 0;
  double m = 0, g = 0, lambda = 0, n = 0, nc = 0;
  CLI::Option *o_m1 = nullptr, *o_m2 = nullptr, *o_g11 = nullptr, *o_g22 = nullptr,
              *o_g12 = nullptr, *o_n1 = nullptr, *o_n2 = nullptr, *o_nc1 = nullptr,
              *o_nc2 = nullptr, *o_hbar = nullptr;
  CLI::Option *o_m = nullptr, *o_g = nullptr, *o_lambda = nullptr, *o_n = nullptr,
              *o_nc = nullptr;
};

void add_param_options(CLI::App* cmd, ParamCli& pc) {
  cmd->add_option("--config", pc.config_path,
                  "JSON file with mixture parameters (full or shorthand keys)");
  pc.o_m1 = cmd->add_option("--m1", pc.m1, "Mass of species 1");
  pc.o_m2 = cmd->add_option("--m2", pc.m2, "Mass of species 2");
  pc.o_g11 = cmd->add_option("--g11", pc.g11, "Intraspecies coupling 1");
  pc.o_g22 = cmd->add_option("--g22", pc.g22, "Intraspecies coupling 2");
  pc.o_g12 = cmd->add_option("--g12", pc.g12, "Interspecies coupling");
  pc.o_n1 = cmd->add_option("--n1", pc.n1, "Total density of species 1");
  pc.o_n2 = cmd->add_option("--n2", pc.n2, "Total density of species 2");
  pc.o_nc1 = cmd->add_option("--nc1", pc.nc1, "Condensate density of species 1");
  pc.o_nc2 = cmd->add_option("--nc2", pc.nc2, "Condensate density of species 2");
  pc.o_hbar = cmd->add_option("--hbar", pc.hbar, "Reduced Planck constant");
  pc.o_m = cmd->add_option("--m", pc.m, "Balanced mass (sets m1 = m2)");
  pc.o_g = cmd->add_option("--g", pc.g, "Balanced coupling (sets g11 = g22)");
  pc.o_lambda = cmd->add_option("--lambda", pc.lambda,
                                "Coupling ratio g12 / g (balanced shorthand)");
  pc.o_n = cmd->add_option("--n", pc.n, "Balanced total density (sets n1 = n2)");
  pc.o_nc = cmd->add_option("--nc", pc.nc,
                            "Balanced condensate density (sets nc1 = nc2)");
}

double json_number(const json& j, const std::string& key) {
  if (!j.is_number())
    throw ConfigError("config key \"" + key + "\" must be a number");
  return j.get<double>();
}

ms::MixtureParams params_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");

  static const std::vector<std::string> full = {"m1", "m2",  "g11", "g22", "g12",
                                                "n1", "n2", "nc1", "nc2"};
  static const std::vector<std::string> shorthand = {"m", "g", "lambda", "n", "nc"};
  bool any_full = false, any_short = false;
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key == "hbar") continue;
    if (std::find(full.begin(), full.end(), key) != full.end())
      any_full = true;
    else if (std::find(shorthand.begin(), shorthand.end(), key) != shorthand.end())
      any_short = true;
    else
      throw ConfigError("unknown config key \"" + key + "\"");
  }
  if (any_full && any_short)
    throw ConfigError("config file mixes full-form and shorthand parameter keys");

  if (any_short) {
    ms::SymmetricParams s;
    if (doc.contains("m")) s.m = json_number(doc["m"], "m");
    if (doc.contains("g")) s.g = json_number(doc["g"], "g");
    if (doc.contains("lambda")) s.lambda = json_number(doc["lambda"], "lambda");
    if (doc.contains("n")) s.n = json_number(doc["n"], "n");
    if (doc.contains("nc")) s.nc = json_number(doc["nc"], "nc");
    if (doc.contains("hbar")) s.hbar = json_number(doc["hbar"], "hbar");
    return ms::embed(s);
  }
  ms::MixtureParams p;
  if (doc.contains("m1")) p.m1 = json_number(doc["m1"], "m1");
  if (doc.contains("m2")) p.m2 = json_number(doc["m2"], "m2");
  if (doc.contains("g11")) p.g11 = json_number(doc["g11"], "g11");
  if (doc.contains("g22")) p.g22 = json_number(doc["g22"], "g22");
  if (doc.contains("g12")) p.g12 = json_number(doc["g12"], "g12");
  if (doc.contains("n1")) p.n1 = json_number(doc["n1"], "n1");
  if (doc.contains("n2")) p.n2 = json_number(doc["n2"], "n2");
  if (doc.contains("nc1")) p.nc1 = json_number(doc["nc1"], "nc1");
  if (doc.contains("nc2")) p.nc2 = json_number(doc["nc2"], "nc2");
  if (doc.contains("hbar")) p.hbar = json_number(doc["hbar"], "hbar");
  return p;
}

ms::MixtureParams resolve_params(const ParamCli& pc) {
  ms::MixtureParams p;
  if (!pc.config_path.empty()) p = params_from_json(pc.config_path);

  // Shorthand flags first, then full-form flags (most specific wins).
  if (pc.o_m->count()) p.m1 = p.m2 = pc.m;
  if (pc.o_g->count()) p.g11 = p.g22 = pc.g;
  if (pc.o_n->count()) p.n1 = p.n2 = pc.n;
  if (pc.o_nc->count()) p.nc1 = p.nc2 = pc.nc;
  if (pc.o_lambda->count()) {
    if (p.g11 != p.g22)
      throw ConfigError("--lambda requires balanced couplings (g11 = g22)");
    p.g12 = pc.lambda * p.g11;
  }
  if (pc.o_m1->count()) p.m1 = pc.m1;
  if (pc.o_m2->count()) p.m2 = pc.m2;
  if (pc.o_g11->count()) p.g11 = pc.g11;
  if (pc.o_g22->count()) p.g22 = pc.g22;
  if (pc.o_g12->count()) p.g12 = pc.g12;
  if (pc.o_n1->count()) p.n1 = pc.n1;
  if (pc.o_n2->count()) p.n2 = pc.n2;
  if (pc.o_nc1->count()) p.nc1 = pc.nc1;
  if (pc.o_nc2->count()) p.nc2 = pc.nc2;
  if (pc.o_hbar->count()) p.hbar = pc.hbar;

  const auto violations = ms::validate(p);
  if (!violations.empty()) {
    std::string msg = "invalid parameters";
    for (const auto& v : violations) msg += "; " + v;
    throw ConfigError(msg);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Fluctuation source shared by spectrum, stability and scan.
// ---------------------------------------------------------------------------

struct FluctCli {
  std::string source = "none";  // none | closed_form
  std::string branch = "minus";
  double nt11 = 0, nt22 = 0, nt12 = 0, mt11 = 0, mt22 = 0, mt12 = 0;
  CLI::Option *o_nt11 = nullptr, *o_nt22 = nullptr, *o_nt12 = nullptr,
              *o_mt11 = nullptr, *o_mt22 = nullptr, *o_mt12 = nullptr;

  bool any_explicit() const {
    return o_nt11->count() || o_nt22->count() || o_nt12->count() ||
           o_mt11->count() || o_mt22->count() || o_mt12->count();
  }
};

void add_fluct_options(CLI::App* cmd, FluctCli& fc) {
  cmd->add_option("--fluct", fc.source, "Fluctuation source")
      ->check(CLI::IsMember({"none", "closed_form"}))
      ->capture_default_str();
  cmd->add_option("--branch", fc.branch, "Branch for the closed-form closure")
      ->check(CLI::IsMember({"minus", "plus"}))
      ->capture_default_str();
  fc.o_nt11 = cmd->add_option("--nt11", fc.nt11, "Explicit reduced average");
  fc.o_nt22 = cmd->add_option("--nt22", fc.nt22, "Explicit reduced average");
  fc.o_nt12 = cmd->add_option("--nt12", fc.nt12, "Explicit reduced average");
  fc.o_mt11 = cmd->add_option("--mt11", fc.mt11, "Explicit reduced average");
  fc.o_mt22 = cmd->add_option("--mt22", fc.mt22, "Explicit reduced average");
  fc.o_mt12 = cmd->add_option("--mt12", fc.mt12, "Explicit reduced average");
}

ms::FluctuationSet resolve_fluct(const ms::MixtureParams& p, const FluctCli& fc) {
  if (fc.source == "closed_form") {
    if (fc.any_explicit())
      throw ConfigError("--fluct closed_form conflicts with explicit --nt*/--mt*");
    const ms::SymmetricParams s = ms::reduce_symmetric(p);
    const ms::Branch b = ms::branch_from_string(fc.branch);
    const auto pair =
        ms::closed_form_intraspecies(b, s.lambda, ms::gamma_1d(s).value);
    return ms::branch_closure(b, pair);
  }
  ms::FluctuationSet fl;
  fl.nt11 = fc.nt11;
  fl.nt22 = fc.nt22;
  fl.nt12 = fc.nt12;
  fl.mt11 = fc.mt11;
  fl.mt22 = fc.mt22;
  fl.mt12 = fc.mt12;
  return fl;
}

std::string fluct_source_json(const FluctCli& fc, const ms::FluctuationSet& fl) {
  return ms::io::jobject({ms::io::jfield("source", ms::io::jstr(fc.source)),
                          ms::io::jfield("branch", ms::io::jstr(fc.branch)),
                          ms::io::jfield("set", ms::io::to_json(fl))});
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumCli {
  ParamCli params;
  FluctCli fluct;
  double k_min = 0, k_max = 0;
  int points = 200;
  bool log_spacing = false;
  bool general = false;
  int threads = 0;
  std::string out = "-";
  CLI::Option *o_kmin = nullptr, *o_kmax = nullptr;
};

unsigned checked_threads(int requested) {
  if (requested < 0) throw ConfigError("--threads must be >= 0");
  return static_cast<unsigned>(requested);
}

int run_spectrum(const SpectrumCli& sc) {
  const ms::MixtureParams p = resolve_params(sc.params);
  const ms::SymmetricParams sym = ms::reduce_symmetric(p);
  if (!(sym.g > 0.0))
    throw ConfigError("spectrum requires g > 0");
  const ms::FluctuationSet fl = resolve_fluct(p, sc.fluct);
  const double f12 = fl.f12();

  const double k_heal = ms::healing_wavenumber(sym);
  const double k_min = sc.o_kmin->count() ? sc.k_min : 0.05 * k_heal;
  const double k_max = sc.o_kmax->count() ? sc.k_max : 5.0 * k_heal;
  if (!(k_min > 0.0) || !(k_max > k_min))
    throw ConfigError("spectrum requires 0 < k-min < k-max");
  if (sc.points < 1) throw ConfigError("spectrum requires k-points >= 1");
  if (sc.points > 1 && sc.log_spacing && !(k_min > 0.0))
    throw ConfigError("log spacing requires k-min > 0");

  const double scale = sym.g * sym.nc / sym.hbar;  // omega units

  std::vector<std::string> fields = {
      ms::io::jfield("subcommand", ms::io::jstr("spectrum")),
      ms::io::jfield("params", ms::io::to_json(sym)),
      ms::io::jfield("fluctuations", fluct_source_json(sc.fluct, fl)),
      ms::io::jfield("k_min", ms::io::jnum(k_min)),
      ms::io::jfield("k_max", ms::io::jnum(k_max)),
      ms::io::jfield("k_points", ms::io::jint(sc.points)),
      ms::io::jfield("log_spacing", ms::io::jbool(sc.log_spacing)),
      ms::io::jfield("general", ms::io::jbool(sc.general)),
      ms::io::jfield("threads", ms::io::jint(sc.threads))};
  const std::string config = ms::io::jobject(fields);

  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(sc.points));
  std::vector<double> dev_minus(rows.size(), 0.0), dev_plus(rows.size(), 0.0);
  const double llo = std::log(k_min), lhi = std::log(k_max);

  ms::parallel_for_index(
      rows.size(), ms::resolve_thread_count(checked_threads(sc.threads)),
      [&](std::size_t i) {
        const double t =
            sc.points == 1 ? 0.0 : double(i) / double(sc.points - 1);
        const double k = sc.log_spacing ? std::exp(llo + t * (lhi - llo))
                                        : k_min + t * (k_max - k_min);
        const double eps = ms::kinetic_eps(k, sym);
        const auto wm = ms::dispersion_minus(eps, sym.lambda, f12) * scale;
        const auto wp = ms::dispersion_plus(eps, sym.lambda) * scale;
        std::vector<std::string> row = {
            ms::io::jnum(k),          ms::io::jnum(eps),
            ms::io::jnum(wm.real()),  ms::io::jnum(wm.imag()),
            ms::io::jnum(wp.real()),  ms::io::jnum(wp.imag())};
        if (sc.general) {
          const auto modes = ms::solve_bdg(k, p, fl);
          auto nearest = [&modes](std::complex<double> target) {
            std::complex<double> best = target;
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& m : modes) {
              const double d = std::abs(m.omega - target);
              if (d < dist) {
                dist = d;
                best = m.omega;
              }
            }
            return best;
          };
          const auto gm = nearest(wm);
          const auto gp = nearest(wp);
          dev_minus[i] = std::abs(gm - wm) / std::max(std::abs(wm), 1e-300);
          dev_plus[i] = std::abs(gp - wp) / std::max(std::abs(wp), 1e-300);
          row.push_back(ms::io::jnum(gm.real()));
          row.push_back(ms::io::jnum(gm.imag()));
          row.push_back(ms::io::jnum(gp.real()));
          row.push_back(ms::io::jnum(gp.imag()));
        }
        rows[i] = std::move(row);
      });

  std::vector<std::string> columns = {"k",
                                      "eps",
                                      "omega_minus_re",
                                      "omega_minus_im",
                                      "omega_plus_re",
                                      "omega_plus_im"};
  std::vector<std::string> comments = {"config " + config};
  if (sc.general) {
    columns.insert(columns.end(), {"general_minus_re", "general_minus_im",
                                   "general_plus_re", "general_plus_im"});
    const double max_m = *std::max_element(dev_minus.begin(), dev_minus.end());
    const double max_p = *std::max_element(dev_plus.begin(), dev_plus.end());
    comments.push_back("general max_rel_dev_minus=" + ms::io::jnum(max_m) +
                       " max_rel_dev_plus=" + ms::io::jnum(max_p));
  }
  write_output(sc.out, ms::io::csv_document(comments, columns, rows));
  return 0;
}

// ---------------------------------------------------------------------------
// fluct
// ---------------------------------------------------------------------------

struct FluctReportCli {
  ParamCli params;
  std::string branch = "minus";
  std::string method = "closed_form";
  double f12 = 0.0;
  double k_min = 0, k_max = std::numeric_limits<double>::infinity();
  double temperature = 0.0;
  bool self_consistent = false;
  double damping = 0.5;
  double tol = 1e-10;
  int max_iter = 200;
  std::string out = "-";
  CLI::Option* o_kmin = nullptr;
};

int run_fluct(const FluctReportCli& fc) {
  const ms::MixtureParams p = resolve_params(fc.params);
  const ms::SymmetricParams sym = ms::reduce_symmetric(p);
  if (!(sym.g > 0.0)) throw ConfigError("fluct requires g > 0");
  const ms::Branch b = ms::branch_from_string(fc.branch);
  const double gap = ms::branch_gap(b, sym.lambda, fc.f12);

  ms::io::FluctReport rep;
  rep.branch = b;
  rep.gamma = ms::gamma_1d(sym);
  rep.method = fc.method;

  const double k_min =
      fc.o_kmin->count() ? fc.k_min : 1e-3 * ms::healing_wavenumber(sym);

  if (fc.method == "closed_form") {
    rep.set = ms::branch_closure(b, ms::closed_form_at_gap(gap, rep.gamma.value));
  } else {
    ms::FluctQuadratureSettings qs;
    qs.k_min = k_min;
    qs.k_max = fc.k_max;
    qs.temperature = fc.temperature;
    const auto q = ms::quadrature_intraspecies(sym, b, fc.f12, qs);
    if (!q.converged)
      throw std::runtime_error("fluct quadrature did not converge (error bound " +
                               ms::io::jnum(q.max_error_bound) + ")");
    rep.set = ms::branch_closure(b, q.nt, q.mt);
    rep.quad = q;
  }

  if (fc.self_consistent) {
    const auto loop =
        ms::self_consistent_loop(sym, b, fc.damping, fc.tol, fc.max_iter);
    if (loop.status != ms::LoopStatus::converged)
      throw std::runtime_error("self-consistent loop failed: " +
                               std::string(ms::to_string(loop.status)) +
                               " after " + std::to_string(loop.iterations) +
                               " iterations (residual " +
                               ms::io::jnum(loop.residual) + ")");
    rep.loop = loop;
    rep.set = loop.set;
    rep.method = "self_consistent";
  }

  const std::string config = ms::io::jobject(
      {ms::io::jfield("subcommand", ms::io::jstr("fluct")),
       ms::io::jfield("params", ms::io::to_json(sym)),
       ms::io::jfield("branch", ms::io::jstr(fc.branch)),
       ms::io::jfield("method", ms::io::jstr(rep.method)),
       ms::io::jfield("f12_input", ms::io::jnum(fc.f12)),
       ms::io::jfield("k_min", ms::io::jnum(k_min)),
       ms::io::jfield("k_max", ms::io::jnum(fc.k_max)),
       ms::io::jfield("temperature", ms::io::jnum(fc.temperature)),
       ms::io::jfield("self_consistent", ms::io::jbool(fc.self_consistent)),
       ms::io::jfield("damping", ms::io::jnum(fc.damping)),
       ms::io::jfield("tol", ms::io::jnum(fc.tol)),
       ms::io::jfield("max_iter", ms::io::jint(fc.max_iter))});

  write_output(fc.out, ms::io::fluct_report_json(rep, config) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

struct StabilityCli {
  ParamCli params;
  FluctCli fluct;
  bool fd_check = false;
  std::string out = "-";
};

int run_stability(const StabilityCli& sc) {
  const ms::MixtureParams p = resolve_params(sc.params);
  const ms::FluctuationSet fl = resolve_fluct(p, sc.fluct);
  const auto rep = ms::stability_check(p, fl, sc.fd_check);

  const std::string config = ms::io::jobject(
      {ms::io::jfield("subcommand", ms::io::jstr("stability")),
       ms::io::jfield("params", ms::io::to_json(p)),
       ms::io::jfield("fluctuations", fluct_source_json(sc.fluct, fl)),
       ms::io::jfield("fd_check", ms::io::jbool(sc.fd_check))});
  write_output(sc.out, ms::io::stability_report_json(rep, config) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// droplet
// ---------------------------------------------------------------------------

struct DropletCli {
  double m = 1.0, hbar = 1.0, g = 1.0, dg = 0.01;
  std::string branch = "minus";
  std::string form = "full";
  std::string order = "leading";
  std::string coeff = "exact";
  double n_min = 1.0, n_max = 6000.0;
  int n_points = 600;
  bool log_spacing = false;
  std::string curve_out;
  std::string out = "-";
};

int run_droplet(const DropletCli& dc) {
  ms::DropletConfig c;
  c.m = dc.m;
  c.hbar = dc.hbar;
  c.g = dc.g;
  c.dg = dc.dg;
  c.branch = ms::branch_from_string(dc.branch);
  c.form = ms::energy_form_from_string(dc.form);
  c.order = ms::asymptotic_order_from_string(dc.order);
  c.coeff_mode = ms::lhy_coeff_mode_from_string(dc.coeff);
  try {
    ms::require_valid(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& w : ms::droplet_warnings(c))
    std::fputs(("# warning: " + w + "\n").c_str(), stderr);

  const std::string config = ms::io::jobject(
      {ms::io::jfield("subcommand", ms::io::jstr("droplet")),
       ms::io::jfield("config", ms::io::to_json(c)),
       ms::io::jfield("n_min", ms::io::jnum(dc.n_min)),
       ms::io::jfield("n_max", ms::io::jnum(dc.n_max)),
       ms::io::jfield("n_points", ms::io::jint(dc.n_points)),
       ms::io::jfield("log_spacing", ms::io::jbool(dc.log_spacing))});

  const auto eq = ms::equilibrium_pair(c);
  write_output(dc.out, ms::io::minima_json(c, eq, config) + "\n");

  if (!dc.curve_out.empty()) {
    ms::CurveGrid grid;
    grid.lo = dc.n_min;
    grid.hi = dc.n_max;
    grid.points = dc.n_points;
    grid.log_spacing = dc.log_spacing;
    ms::DropletCurve curve;
    try {
      curve = ms::figure_curve(c, grid);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    std::vector<std::vector<std::string>> rows;
    rows.reserve(curve.points.size());
    for (const auto& pt : curve.points)
      rows.push_back({ms::io::jnum(pt.n), ms::io::jnum(pt.e_correlated),
                      ms::io::jnum(pt.e_uncorrelated)});
    write_output(dc.curve_out,
                 ms::io::csv_document({"config " + config},
                                      {"n", "e_correlated", "e_uncorrelated"}, rows));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanCli {
  ParamCli params;
  FluctCli fluct;
  std::string parameter;
  double start = 0.0, stop = 0.0;
  int count = 101;
  double step = 0.0;
  int threads = 0;
  std::string out = "-";
  CLI::Option *o_count = nullptr, *o_step = nullptr;
};

ms::MixtureParams scan_point(const ms::MixtureParams& base,
                             const std::string& parameter, double value) {
  ms::MixtureParams p = base;
  if (parameter == "g12") {
    p.g12 = value;
    return p;
  }
  ms::SymmetricParams s = ms::reduce_symmetric(base);
  if (parameter == "lambda") {
    s.lambda = value;
  } else if (parameter == "n") {
    if (!(value > 0.0))
      throw ConfigError("scan over n requires positive densities");
    s.n = s.nc = value;  // condensate tracks the total along the scan
  } else {  // dg
    s.lambda = value / s.g - 1.0;
  }
  return ms::embed(s);
}

int run_scan(const ScanCli& sc) {
  const ms::MixtureParams base = resolve_params(sc.params);
  if (!(sc.stop >= sc.start))
    throw ConfigError("scan requires start <= stop");

  std::vector<double> values;
  if (sc.o_step->count()) {
    if (!(sc.step > 0.0)) throw ConfigError("scan requires step > 0");
    for (double v = sc.start; v <= sc.stop + 1e-12 * std::fabs(sc.step); v += sc.step)
      values.push_back(v);
  } else {
    if (sc.count < 1) throw ConfigError("scan requires count >= 1");
    for (int i = 0; i < sc.count; ++i) {
      const double t = sc.count == 1 ? 0.0 : double(i) / double(sc.count - 1);
      values.push_back(sc.start + t * (sc.stop - sc.start));
    }
  }

  const ms::FluctuationSet base_fl = resolve_fluct(base, sc.fluct);
  const std::string config = ms::io::jobject(
      {ms::io::jfield("subcommand", ms::io::jstr("scan")),
       ms::io::jfield("parameter", ms::io::jstr(sc.parameter)),
       ms::io::jfield("start", ms::io::jnum(sc.start)),
       ms::io::jfield("stop", ms::io::jnum(sc.stop)),
       ms::io::jfield("points", ms::io::jint(std::int64_t(values.size()))),
       ms::io::jfield("base_params", ms::io::to_json(base)),
       ms::io::jfield("fluctuations", fluct_source_json(sc.fluct, base_fl)),
       ms::io::jfield("threads", ms::io::jint(sc.threads))});

  std::vector<std::vector<std::string>> rows(values.size());
  ms::parallel_for_index(
      values.size(), ms::resolve_thread_count(checked_threads(sc.threads)),
      [&](std::size_t i) {
        const ms::MixtureParams p = scan_point(base, sc.parameter, values[i]);
        const ms::FluctuationSet fl = resolve_fluct(p, sc.fluct);
        const auto rep = ms::stability_check(p, fl);
        rows[i] = {ms::io::jnum(values[i]),
                   ms::io::jnum(rep.couplings.g1),
                   ms::io::jnum(rep.couplings.g2),
                   ms::io::jnum(rep.couplings.g12),
                   ms::io::jnum(rep.trace_a),
                   ms::io::jnum(rep.det_a),
                   ms::to_string(rep.verdict)};
      });

  write_output(sc.out,
               ms::io::csv_document({"config " + config},
                                    {sc.parameter, "G1", "G2", "G12", "trace_a",
                                     "det_a", "verdict"},
                                    rows));
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate() {
  const auto checks = ms::run_validation();
  std::string out;
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out += (c.passed ? "[PASS] " : "[FAIL] ") + c.name + " (" + c.detail + ")\n";
    if (!c.passed) ++failed;
  }
  out += std::to_string(checks.size() - failed) + "/" +
         std::to_string(checks.size()) + " checks passed\n";
  std::fwrite(out.data(), 1, out.size(), stdout);
  if (failed) throw ValidationError(std::to_string(failed) + " validation checks failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability toolkit for one-dimensional binary condensate mixtures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("mixstab ") + ms::version_string);

  SpectrumCli spectrum;
  auto* cmd_spectrum = app.add_subcommand(
      "spectrum", "Export the excitation branches over a wavenumber grid");
  add_param_options(cmd_spectrum, spectrum.params);
  add_fluct_options(cmd_spectrum, spectrum.fluct);
  spectrum.o_kmin = cmd_spectrum->add_option("--k-min", spectrum.k_min,
                                             "Lowest wavenumber (default 0.05 k_heal)");
  spectrum.o_kmax = cmd_spectrum->add_option("--k-max", spectrum.k_max,
                                             "Highest wavenumber (default 5 k_heal)");
  cmd_spectrum->add_option("--k-points", spectrum.points, "Grid size")
      ->capture_default_str();
  cmd_spectrum->add_flag("--log", spectrum.log_spacing, "Logarithmic wavenumber grid");
  cmd_spectrum->add_flag("--general", spectrum.general,
                         "Also diagonalize the full 4x4 problem and report the "
                         "maximum deviation from the analytic branches");
  cmd_spectrum->add_option("--threads", spectrum.threads,
                           "Worker threads (0 = auto; MIXSTAB_THREADS overrides)");
  cmd_spectrum->add_option("--out", spectrum.out, "Output path or - for stdout")
      ->capture_default_str();

  FluctReportCli fluct;
  auto* cmd_fluct = app.add_subcommand(
      "fluct", "Report the quantum fluctuation averages of one branch");
  add_param_options(cmd_fluct, fluct.params);
  cmd_fluct->add_option("--branch", fluct.branch, "Excitation branch")
      ->check(CLI::IsMember({"minus", "plus"}))
      ->capture_default_str();
  cmd_fluct->add_option("--method", fluct.method, "Evaluation method")
      ->check(CLI::IsMember({"closed_form", "quadrature"}))
      ->capture_default_str();
  cmd_fluct->add_option("--f12", fluct.f12,
                        "Interspecies pairing sum entering the gap")
      ->capture_default_str();
  fluct.o_kmin = cmd_fluct->add_option(
      "--k-min", fluct.k_min, "Infrared cutoff (default 1e-3 k_heal, quadrature)");
  cmd_fluct->add_option("--k-max", fluct.k_max, "Ultraviolet cutoff (quadrature)");
  cmd_fluct->add_option("--temperature", fluct.temperature,
                        "k_B T in units of g nc (quadrature)")
      ->capture_default_str();
  cmd_fluct->add_flag("--self-consistent", fluct.self_consistent,
                      "Iterate the closure to its fixed point");
  cmd_fluct->add_option("--damping", fluct.damping, "Loop mixing parameter")
      ->capture_default_str();
  cmd_fluct->add_option("--tol", fluct.tol, "Loop convergence tolerance")
      ->capture_default_str();
  cmd_fluct->add_option("--max-iter", fluct.max_iter, "Loop iteration budget")
      ->capture_default_str();
  cmd_fluct->add_option("--out", fluct.out, "Output path or - for stdout")
      ->capture_default_str();

  StabilityCli stability;
  auto* cmd_stability = app.add_subcommand(
      "stability", "Hessian stability verdict for a mixture working point");
  add_param_options(cmd_stability, stability.params);
  add_fluct_options(cmd_stability, stability.fluct);
  cmd_stability->add_flag("--fd-check", stability.fd_check,
                          "Cross-check the analytic derivatives by finite differences");
  cmd_stability->add_option("--out", stability.out, "Output path or - for stdout")
      ->capture_default_str();

  DropletCli droplet;
  auto* cmd_droplet = app.add_subcommand(
      "droplet", "Droplet energy landscape and equilibrium minima");
  cmd_droplet->add_option("--m", droplet.m, "Mass")->capture_default_str();
  cmd_droplet->add_option("--hbar", droplet.hbar, "Reduced Planck constant")
      ->capture_default_str();
  cmd_droplet->add_option("--g", droplet.g, "Balanced coupling")
      ->capture_default_str();
  cmd_droplet->add_option("--dg", droplet.dg, "Mean-field detuning g + g12")
      ->capture_default_str();
  cmd_droplet->add_option("--branch", droplet.branch, "Excitation branch")
      ->check(CLI::IsMember({"minus", "plus"}))
      ->capture_default_str();
  cmd_droplet->add_option("--form", droplet.form, "Energy form")
      ->check(CLI::IsMember({"full", "asymptotic"}))
      ->capture_default_str();
  cmd_droplet->add_option("--order", droplet.order, "Asymptotic truncation")
      ->check(CLI::IsMember({"leading", "first_order"}))
      ->capture_default_str();
  cmd_droplet->add_option("--coeff", droplet.coeff, "Energy coefficient mode")
      ->check(CLI::IsMember({"exact", "rounded"}))
      ->capture_default_str();
  cmd_droplet->add_option("--n-min", droplet.n_min, "Curve window start")
      ->capture_default_str();
  cmd_droplet->add_option("--n-max", droplet.n_max, "Curve window end")
      ->capture_default_str();
  cmd_droplet->add_option("--n-points", droplet.n_points, "Curve grid size")
      ->capture_default_str();
  cmd_droplet->add_flag("--log", droplet.log_spacing, "Logarithmic density grid");
  cmd_droplet->add_option("--curve-out", droplet.curve_out,
                          "Write the energy curve CSV to this path");
  cmd_droplet->add_option("--out", droplet.out,
                          "Minima JSON path or - for stdout")
      ->capture_default_str();

  ScanCli scan;
  auto* cmd_scan = app.add_subcommand(
      "scan", "Stability verdicts along a one-parameter sweep");
  add_param_options(cmd_scan, scan.params);
  add_fluct_options(cmd_scan, scan.fluct);
  cmd_scan->add_option("--param", scan.parameter, "Swept parameter")
      ->check(CLI::IsMember({"lambda", "g12", "n", "dg"}))
      ->required();
  cmd_scan->add_option("--start", scan.start, "First value")->required();
  cmd_scan->add_option("--stop", scan.stop, "Last value")->required();
  scan.o_count = cmd_scan->add_option("--count", scan.count, "Number of points")
                     ->capture_default_str();
  scan.o_step = cmd_scan->add_option("--step", scan.step, "Grid step");
  scan.o_step->excludes(scan.o_count);
  cmd_scan->add_option("--threads", scan.threads,
                       "Worker threads (0 = auto; MIXSTAB_THREADS overrides)");
  cmd_scan->add_option("--out", scan.out, "Output path or - for stdout")
      ->capture_default_str();

  auto* cmd_validate = app.add_subcommand(
      "validate", "Run the built-in numerical validation suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::stringstream devnull;
    app.exit(e, devnull, devnull);
    emit_error(1, "usage", e.what());
    return 1;
  }

  try {
    if (cmd_spectrum->parsed()) return run_spectrum(spectrum);
    if (cmd_fluct->parsed()) return run_fluct(fluct);
    if (cmd_stability->parsed()) return run_stability(stability);
    if (cmd_droplet->parsed()) return run_droplet(droplet);
    if (cmd_scan->parsed()) return run_scan(scan);
    if (cmd_validate->parsed()) return run_validate();
  } catch (const ConfigError& e) {
    emit_error(2, "config", e.what());
    return 2;
  } catch (const ValidationError& e) {
    emit_error(4, "validation", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    emit_error(2, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error(3, "numerical", e.what());
    return 3;
  }
  emit_error(1, "usage", "no subcommand selected");
  return 1;
}
