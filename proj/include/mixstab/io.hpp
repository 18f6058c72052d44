#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixstab/droplet.hpp"
#include "mixstab/fluctuations.hpp"
#include "mixstab/params.hpp"
#include "mixstab/stability.hpp"
#include "mixstab/version.hpp"

namespace mixstab::io {

/// 17 significant digits: round-trip exact for 64-bit doubles, so identical
/// inputs yield byte-identical files regardless of parallelism.
using detail::num;

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (ch < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out;
}

inline std::string jstr(const std::string& s) { return "\"" + json_escape(s) + "\""; }

/// Non-finite values are not representable in JSON numbers; keep them as
/// tagged strings rather than silently nulling them.
inline std::string jnum(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0.0 ? "\"inf\"" : "\"-inf\"";
  return num(x);
}

inline std::string jint(std::int64_t v) { return std::to_string(v); }

inline std::string jbool(bool b) { return b ? "true" : "false"; }

inline std::string jfield(const std::string& key, const std::string& rendered) {
  return jstr(key) + ":" + rendered;
}

inline std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string jobject(const std::vector<std::string>& fields) {
  return "{" + join(fields, ",") + "}";
}

inline std::string jarray(const std::vector<std::string>& rendered) {
  return "[" + join(rendered, ",") + "]";
}

/// Every JSON artifact carries the tool version and the resolved
/// configuration it was produced from.
inline std::string meta_json(const std::string& config_json) {
  return jobject({jfield("version", jstr(version_string)),
                  jfield("config", config_json)});
}

inline std::string to_json(const MixtureParams& p) {
  return jobject({jfield("m1", jnum(p.m1)), jfield("m2", jnum(p.m2)),
                  jfield("g11", jnum(p.g11)), jfield("g22", jnum(p.g22)),
                  jfield("g12", jnum(p.g12)), jfield("n1", jnum(p.n1)),
                  jfield("n2", jnum(p.n2)), jfield("nc1", jnum(p.nc1)),
                  jfield("nc2", jnum(p.nc2)), jfield("hbar", jnum(p.hbar))});
}

inline std::string to_json(const SymmetricParams& s) {
  return jobject({jfield("m", jnum(s.m)), jfield("g", jnum(s.g)),
                  jfield("lambda", jnum(s.lambda)), jfield("n", jnum(s.n)),
                  jfield("nc", jnum(s.nc)), jfield("hbar", jnum(s.hbar))});
}

inline std::string to_json(const FluctuationSet& fl) {
  return jobject({jfield("nt11", jnum(fl.nt11)), jfield("nt22", jnum(fl.nt22)),
                  jfield("nt12", jnum(fl.nt12)), jfield("mt11", jnum(fl.mt11)),
                  jfield("mt22", jnum(fl.mt22)), jfield("mt12", jnum(fl.mt12))});
}

inline std::string to_json(const FdCheck& fd) {
  return jobject({jfield("run", jbool(fd.run)),
                  jfield("grad_rel_err", jnum(fd.grad_rel_err)),
                  jfield("hess_rel_err", jnum(fd.hess_rel_err)),
                  jfield("agrees", jbool(fd.agrees))});
}

/// Full stability report; the boolean flags are recomputed from the couplings
/// so they can never drift out of sync with trace/det.
inline std::string stability_report_json(const StabilityReport& rep,
                                         const std::string& config_json) {
  std::vector<std::string> fields;
  fields.push_back(jfield("meta", meta_json(config_json)));
  fields.push_back(jfield("params", to_json(rep.params)));
  fields.push_back(jfield("fluctuations", to_json(rep.fluctuations)));
  fields.push_back(jfield("g1_eff", jnum(rep.couplings.g1)));
  fields.push_back(jfield("g2_eff", jnum(rep.couplings.g2)));
  fields.push_back(jfield("g12_eff", jnum(rep.couplings.g12)));
  fields.push_back(jfield("trace_a", jnum(rep.trace_a)));
  fields.push_back(jfield("det_a", jnum(rep.det_a)));
  fields.push_back(jfield("stable_collapse", jbool(rep.trace_a > 0.0)));
  fields.push_back(jfield("stable_separation", jbool(rep.det_a > 0.0)));
  fields.push_back(jfield("verdict", jstr(to_string(rep.verdict))));
  fields.push_back(jfield("hessian_fd", rep.fd.run ? to_json(rep.fd) : "null"));
  return jobject(fields);
}

/// Assembled by the front-end from the closed forms plus the optional
/// diagnostic channels.
struct FluctReport {
  Branch branch = Branch::minus;
  Gamma1d gamma{};
  FluctuationSet set{};
  std::string method = "closed_form";  // or "quadrature"
  std::optional<QuadratureFluctuations> quad{};
  std::optional<SelfConsistentResult> loop{};
};

inline std::string fluct_report_json(const FluctReport& r,
                                     const std::string& config_json) {
  std::vector<std::string> fields;
  fields.push_back(jfield("meta", meta_json(config_json)));
  fields.push_back(jfield("branch", jstr(to_string(r.branch))));
  fields.push_back(jfield("gamma1d", jnum(r.gamma.value)));
  fields.push_back(
      jfield("gamma1d_beyond_weak_coupling", jbool(r.gamma.beyond_weak_coupling)));
  fields.push_back(jfield("nt", jnum(r.set.nt11)));
  fields.push_back(jfield("mt", jnum(r.set.mt11)));
  fields.push_back(jfield("nt12", jnum(r.set.nt12)));
  fields.push_back(jfield("mt12", jnum(r.set.mt12)));
  fields.push_back(jfield("lhy_sum", jnum(r.set.nt11 + r.set.mt11)));
  fields.push_back(jfield("method", jstr(r.method)));
  if (r.quad) {
    const auto& q = *r.quad;
    fields.push_back(jfield(
        "ir_diagnostics",
        jobject({jfield("k_min", jnum(q.ir.k_min)),
                 jfield("nt_at_kmin", jnum(q.ir.nt_at_kmin)),
                 jfield("nt_at_2kmin", jnum(q.ir.nt_at_2kmin)),
                 jfield("mt_at_kmin", jnum(q.ir.mt_at_kmin)),
                 jfield("mt_at_2kmin", jnum(q.ir.mt_at_2kmin)),
                 jfield("nt_sensitivity", jnum(q.ir.nt_sensitivity)),
                 jfield("mt_sensitivity", jnum(q.ir.mt_sensitivity)),
                 jfield("sum_ir_safe", jnum(q.sum_ir_safe)),
                 jfield("max_error_bound", jnum(q.max_error_bound)),
                 jfield("evaluations", jint(q.evaluations)),
                 jfield("converged", jbool(q.converged))})));
  } else {
    fields.push_back(jfield("ir_diagnostics", "null"));
  }
  if (r.loop) {
    const auto& l = *r.loop;
    fields.push_back(jfield(
        "self_consistent",
        jobject({jfield("iterations", jint(l.iterations)),
                 jfield("residual", jnum(l.residual)), jfield("gap", jnum(l.gap)),
                 jfield("status", jstr(to_string(l.status))),
                 jfield("set", to_json(l.set))})));
  } else {
    fields.push_back(jfield("self_consistent", "null"));
  }
  return jobject(fields);
}

inline std::string to_json(const DropletConfig& c) {
  return jobject({jfield("m", jnum(c.m)), jfield("hbar", jnum(c.hbar)),
                  jfield("g", jnum(c.g)), jfield("dg", jnum(c.dg)),
                  jfield("branch", jstr(to_string(c.branch))),
                  jfield("correlated", jbool(c.correlated)),
                  jfield("form", jstr(to_string(c.form))),
                  jfield("order", jstr(to_string(c.order))),
                  jfield("coeff_mode", jstr(to_string(c.coeff_mode)))});
}

inline std::string to_json(const EquilibriumPoint& pt) {
  std::vector<std::string> fields;
  fields.push_back(jfield("bounded", jbool(pt.bounded)));
  if (!pt.bounded) {
    fields.push_back(jfield("note", jstr(pt.note)));
    return jobject(fields);
  }
  fields.push_back(jfield("n_star", jnum(pt.n_star)));
  fields.push_back(jfield("e_star", jnum(pt.e_star)));
  fields.push_back(jfield("closed_form_available", jbool(pt.closed_form.available)));
  if (pt.closed_form.available) {
    fields.push_back(jfield("closed_form_n_star", jnum(pt.closed_form.n_star)));
    fields.push_back(jfield("closed_form_e_star", jnum(pt.closed_form.e_star)));
    fields.push_back(jfield("closed_form_rel_dev", jnum(pt.closed_form_rel_dev)));
  }
  return jobject(fields);
}

/// Minima summary for the droplet front-end: flat anchors plus the detailed
/// per-form sub-reports.
inline std::string minima_json(const DropletConfig& c, const EquilibriumResult& eq,
                               const std::string& config_json) {
  std::vector<std::string> fields;
  fields.push_back(jfield("meta", meta_json(config_json)));
  fields.push_back(jfield("branch", jstr(to_string(c.branch))));
  const bool both = eq.correlated.bounded && eq.uncorrelated.bounded;
  fields.push_back(jfield(
      "n_star_corr", eq.correlated.bounded ? jnum(eq.correlated.n_star) : "null"));
  fields.push_back(jfield(
      "e_star_corr", eq.correlated.bounded ? jnum(eq.correlated.e_star) : "null"));
  fields.push_back(jfield(
      "n_star_uncorr", eq.uncorrelated.bounded ? jnum(eq.uncorrelated.n_star) : "null"));
  fields.push_back(jfield(
      "e_star_uncorr", eq.uncorrelated.bounded ? jnum(eq.uncorrelated.e_star) : "null"));
  fields.push_back(jfield(
      "ratios", both ? jobject({jfield("n", jnum(eq.ratio_n)),
                                jfield("e", jnum(eq.ratio_e))})
                     : "null"));
  fields.push_back(jfield("correlated", to_json(eq.correlated)));
  fields.push_back(jfield("uncorrelated", to_json(eq.uncorrelated)));
  return jobject(fields);
}

/// CSV document: '#'-prefixed comment lines (tool version + resolved config
/// first), one header row, then pre-rendered cells.
inline std::string csv_document(const std::vector<std::string>& comments,
                                const std::vector<std::string>& columns,
                                const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  out += "# mixstab version=";
  out += version_string;
  out += "\n";
  for (const auto& c : comments) out += "# " + c + "\n";
  out += join(columns, ",") + "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::logic_error("csv_document: row width does not match header");
    out += join(row, ",") + "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace mixstab::io
