// End-to-end checks of the mixstab binary: spawns the tool found via the
// MIXSTAB_BIN environment variable and inspects exit codes, stdout artifacts
// and stderr error objects.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string& cli_path() {
  static const std::string path = [] {
    const char* p = std::getenv("MIXSTAB_BIN");
    REQUIRE(p != nullptr);
    return std::string(p);
  }();
  return path;
}

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("mixstab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path outp = scratch_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path errp = scratch_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = env_prefix + "\"" + cli_path() + "\" " + args + " >" +
                          outp.string() + " 2>" + errp.string();
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(outp);
  r.err = slurp(errp);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  bool header_seen = false;
  for (const auto& line : lines_of(text)) {
    if (!line.empty() && line[0] == '#') {
      csv.comments.push_back(line);
    } else if (!header_seen) {
      csv.columns = split_csv(line);
      header_seen = true;
    } else {
      csv.rows.push_back(split_csv(line));
    }
  }
  return csv;
}

json error_of(const CliResult& r) {
  const json doc = json::parse(r.err);
  REQUIRE(doc.contains("error"));
  return doc["error"];
}

}  // namespace

TEST_CASE("validate subcommand runs the oracle suite", "[cli]") {
  const auto r = run_cli("validate");
  INFO(r.out << r.err);
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, ContainsSubstring("[PASS] "));
  REQUIRE(r.out.find("[FAIL]") == std::string::npos);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 16);  // at least 15 checks plus the tally
  REQUIRE_THAT(lines.back(), ContainsSubstring("checks passed"));
}

TEST_CASE("version flag reports the tool version", "[cli]") {
  const auto r = run_cli("--version");
  REQUIRE(r.code == 0);
  REQUIRE_THAT(r.out, StartsWith("mixstab 0.1.0"));
}

TEST_CASE("droplet minima match the rounded closed form", "[cli]") {
  const auto r = run_cli(
      "droplet --g 1 --dg 0.01 --branch minus --form asymptotic "
      "--coeff rounded");
  INFO(r.err);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["meta"]["version"] == "0.1.0");
  CHECK(j["meta"]["config"]["subcommand"] == "droplet");
  CHECK(j["branch"] == "minus");
  CHECK_THAT(j["n_star_corr"].get<double>(),
             WithinRel(2464.02, 1e-3));
  CHECK_THAT(j["e_star_corr"].get<double>(), WithinRel(-20237.981868, 1e-6));
  CHECK_THAT(j["ratios"]["n"].get<double>(), WithinAbs(4.0, 1e-6));
  CHECK_THAT(j["ratios"]["e"].get<double>(), WithinAbs(16.0, 1e-6));
  CHECK(j["correlated"]["bounded"] == true);
  CHECK(j["correlated"]["closed_form_available"] == true);
  CHECK(j["correlated"]["closed_form_rel_dev"].get<double>() < 1e-8);
}

TEST_CASE("droplet writes curve CSV and warns on a large detuning", "[cli]") {
  const fs::path curve = scratch_dir() / "curve.csv";
  const fs::path minima = scratch_dir() / "minima.json";
  const auto r = run_cli("droplet --g 1 --dg 0.5 --form asymptotic --out " +
                         minima.string() + " --curve-out " + curve.string() +
                         " --n-min 0.001 --n-max 1 --n-points 50");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.empty());
  REQUIRE_THAT(r.err, ContainsSubstring("# warning:"));
  const json j = json::parse(slurp(minima));
  CHECK(j["branch"] == "minus");
  const Csv csv = parse_csv(slurp(curve));
  REQUIRE(csv.columns ==
          std::vector<std::string>{"n", "e_correlated", "e_uncorrelated"});
  REQUIRE(csv.rows.size() == 50);
  REQUIRE_THAT(csv.comments.front(), StartsWith("# mixstab version=0.1.0"));
}

TEST_CASE("stability verdicts and report fields", "[cli]") {
  SECTION("classic separation point") {
    const auto r = run_cli("stability --g11 1 --g22 1 --g12 1.2");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["verdict"] == "separation");
    CHECK(j["det_a"].get<double>() < 0.0);
    CHECK_THAT(j["trace_a"].get<double>(), WithinAbs(2.0, 1e-15));
    CHECK(j["stable_collapse"] == true);
    CHECK(j["stable_separation"] == false);
    CHECK(j["hessian_fd"].is_null());
    CHECK(j["meta"]["config"]["fluctuations"]["source"] == "none");
  }
  SECTION("finite-difference cross-check is reported") {
    const auto r = run_cli("stability --g12 0.5 --nt12 -0.1 --mt12 -0.1 --fd-check");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK_THAT(j["trace_a"].get<double>(), WithinAbs(2.1, 1e-12));
    CHECK_THAT(j["det_a"].get<double>(), WithinAbs(0.9, 1e-12));
    CHECK(j["verdict"] == "stable");
    REQUIRE(j["hessian_fd"].is_object());
    CHECK(j["hessian_fd"]["run"] == true);
    CHECK(j["hessian_fd"]["agrees"] == true);
  }
  SECTION("closed-form fluctuation source fills the set") {
    const auto r = run_cli(
        "stability --m 1 --g 1 --lambda 0.5 --n 100 --nc 100 "
        "--fluct closed_form --branch minus");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["fluctuations"]["nt11"].get<double>() > 0.0);
    CHECK(j["fluctuations"]["mt11"].get<double>() < 0.0);
    CHECK(j["fluctuations"]["nt12"].get<double>() ==
          -j["fluctuations"]["nt11"].get<double>());
    CHECK(j["meta"]["config"]["fluctuations"]["source"] == "closed_form");
  }
}

TEST_CASE("fluct closed form at the decoupled point", "[cli]") {
  const auto r = run_cli("fluct --lambda 0 --n 100");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["branch"] == "minus");
  CHECK_THAT(j["gamma1d"].get<double>(), WithinAbs(0.1, 1e-15));
  CHECK(j["gamma1d_beyond_weak_coupling"] == false);
  CHECK_THAT(j["lhy_sum"].get<double>(),
             WithinRel(-0.011681112983269274, 1e-12));
  CHECK(j["method"] == "closed_form");
  CHECK(j["ir_diagnostics"].is_null());
  CHECK(j["self_consistent"].is_null());
}

TEST_CASE("fluct quadrature reports infrared diagnostics", "[cli]") {
  const auto r = run_cli(
      "fluct --lambda 0 --n 100 --nc 100 --method quadrature --k-min 0.001");
  INFO(r.err);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "quadrature");
  REQUIRE(j["ir_diagnostics"].is_object());
  CHECK_THAT(j["ir_diagnostics"]["k_min"].get<double>(), WithinAbs(1e-3, 1e-18));
  CHECK(j["ir_diagnostics"]["converged"] == true);
  CHECK(j["nt"].get<double>() > 0.0);
  CHECK(j["mt"].get<double>() < 0.0);
  // Cutoff-free combination: -sqrt(m g c / nc) / (pi hbar) at unit gap.
  CHECK_THAT(j["ir_diagnostics"]["sum_ir_safe"].get<double>(),
             WithinRel(-0.1 / std::numbers::pi, 1e-8));
}

TEST_CASE("fluct self-consistent loop reaches the fixed point", "[cli]") {
  const auto r = run_cli("fluct --lambda -0.99 --n 100 --nc 100 --self-consistent");
  INFO(r.err);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "self_consistent");
  REQUIRE(j["self_consistent"].is_object());
  CHECK(j["self_consistent"]["status"] == "converged");
  CHECK_THAT(j["self_consistent"]["gap"].get<double>(),
             WithinRel(2.00638045887989, 1e-6));
  CHECK_THAT(j["nt"].get<double>(), WithinRel(0.008493928053249, 1e-6));
}

TEST_CASE("spectrum CSV structure and analytic content", "[cli]") {
  const auto r = run_cli(
      "spectrum --m 1 --g 1 --lambda 0.5 --n 1 --nc 1 --k-points 16");
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  REQUIRE_THAT(csv.comments.at(0), StartsWith("# mixstab version=0.1.0"));
  REQUIRE_THAT(csv.comments.at(1),
               ContainsSubstring("\"subcommand\":\"spectrum\""));
  REQUIRE(csv.columns ==
          std::vector<std::string>{"k", "eps", "omega_minus_re",
                                   "omega_minus_im", "omega_plus_re",
                                   "omega_plus_im"});
  REQUIRE(csv.rows.size() == 16);
  double prev_k = 0.0;
  for (const auto& row : csv.rows) {
    REQUIRE(row.size() == 6);
    const double k = std::stod(row[0]);
    REQUIRE(k > prev_k);
    prev_k = k;
    CHECK(std::stod(row[3]) == 0.0);  // stable branch: no imaginary part
    CHECK(std::stod(row[4]) > std::stod(row[2]));  // hard above soft branch
  }
}

TEST_CASE("spectrum --general cross-checks the 4x4 solver", "[cli]") {
  const auto r = run_cli(
      "spectrum --m 1 --g 1 --lambda 0.5 --n 1 --nc 1 --k-points 8 --general");
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  REQUIRE(csv.columns.size() == 10);
  REQUIRE(csv.columns[6] == "general_minus_re");
  bool found = false;
  for (const auto& c : csv.comments) {
    const auto pos = c.find("general max_rel_dev_minus=");
    if (pos == std::string::npos) continue;
    found = true;
    std::istringstream in(c.substr(pos));
    std::string tok;
    in >> tok;  // "general"
    double dm = 1.0, dp = 1.0;
    in >> tok;
    REQUIRE(std::sscanf(tok.c_str(), "max_rel_dev_minus=%lf", &dm) == 1);
    in >> tok;
    REQUIRE(std::sscanf(tok.c_str(), "max_rel_dev_plus=%lf", &dp) == 1);
    CHECK(dm < 1e-9);
    CHECK(dp < 1e-9);
  }
  REQUIRE(found);
  for (const auto& row : csv.rows) {
    CHECK_THAT(std::stod(row[6]), WithinRel(std::stod(row[2]), 1e-8));
    CHECK_THAT(std::stod(row[8]), WithinRel(std::stod(row[4]), 1e-8));
  }
}

TEST_CASE("scan output is deterministic across thread counts", "[cli]") {
  const std::string args =
      "scan --param g12 --start -1.5 --stop 1.5 --count 41 --g 1 --n 1 --nc 1";
  const auto one = run_cli(args, "MIXSTAB_THREADS=1 ");
  const auto four = run_cli(args, "MIXSTAB_THREADS=4 ");
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  REQUIRE(one.out == four.out);

  const Csv csv = parse_csv(one.out);
  REQUIRE(csv.columns ==
          std::vector<std::string>{"g12", "G1", "G2", "G12", "trace_a", "det_a",
                                   "verdict"});
  REQUIRE(csv.rows.size() == 41);
  double prev = -1e300;
  bool saw_stable = false, saw_separation = false;
  for (const auto& row : csv.rows) {
    const double v = std::stod(row[0]);
    REQUIRE(v > prev);
    prev = v;
    if (row[6] == "stable") saw_stable = true;
    if (row[6] == "separation") saw_separation = true;
  }
  CHECK(saw_stable);
  CHECK(saw_separation);
}

TEST_CASE("scan over lambda recomputes the closure per point", "[cli]") {
  const auto r = run_cli(
      "scan --param lambda --start -0.5 --stop 0.5 --count 3 "
      "--fluct closed_form --branch minus --n 100 --nc 100");
  INFO(r.err);
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 3);
  // Middle point is the decoupled mixture: bare couplings survive untouched.
  const auto& mid = csv.rows[1];
  CHECK_THAT(std::stod(mid[0]), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::stod(mid[1]), WithinAbs(1.0, 1e-15));
  CHECK_THAT(std::stod(mid[3]), WithinAbs(0.0, 1e-15));
  CHECK(mid[6] == "stable");
  // Off-center points carry a nonzero interspecies dressing of G12 and G1.
  CHECK(std::fabs(std::stod(csv.rows[0][3]) + 0.5) > 1e-3);
  CHECK(std::stod(csv.rows[0][1]) > 1.0);
}

TEST_CASE("scan honors an explicit step", "[cli]") {
  const auto r = run_cli("scan --param n --start 1 --stop 2 --step 0.25");
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 5);
  CHECK_THAT(std::stod(csv.rows[4][0]), WithinAbs(2.0, 1e-12));
}

TEST_CASE("config file parameters with flag overrides", "[cli]") {
  const fs::path cfg = scratch_dir() / "mix.json";
  {
    std::ofstream f(cfg);
    f << R"({"m": 1.0, "g": 1.0, "lambda": 0.5, "n": 100.0, "nc": 100.0})";
  }
  const auto r = run_cli("stability --config " + cfg.string() + " --g12 0.2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["params"]["g12"].get<double>() == 0.2);
  CHECK(j["params"]["g11"].get<double>() == 1.0);
  CHECK(j["params"]["n1"].get<double>() == 100.0);

  const fs::path full = scratch_dir() / "full.json";
  {
    std::ofstream f(full);
    f << R"({"m1": 1.0, "m2": 2.0, "g11": 1.0, "g22": 0.8, "g12": 0.3,)"
      << R"( "n1": 1.0, "n2": 2.0, "nc1": 1.0, "nc2": 2.0, "hbar": 1.0})";
  }
  const auto r2 = run_cli("stability --config " + full.string());
  REQUIRE(r2.code == 0);
  const json j2 = json::parse(r2.out);
  CHECK(j2["params"]["m2"].get<double>() == 2.0);
  CHECK(j2["params"]["g22"].get<double>() == 0.8);
}

TEST_CASE("error contracts", "[cli]") {
  SECTION("unknown subcommand is a usage error") {
    const auto r = run_cli("frobnicate");
    REQUIRE(r.code == 1);
    const json e = error_of(r);
    CHECK(e["kind"] == "usage");
    CHECK(e["code"].get<int>() == 1);
  }
  SECTION("help exits cleanly") {
    const auto r = run_cli("--help");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("spectrum"));
    REQUIRE_THAT(r.out, ContainsSubstring("droplet"));
  }
  SECTION("invalid physical parameters are config errors") {
    const auto r = run_cli("stability --n1 -1");
    REQUIRE(r.code == 2);
    const json e = error_of(r);
    CHECK(e["kind"] == "config");
    CHECK_THAT(e["message"].get<std::string>(), ContainsSubstring("n1"));
  }
  SECTION("unstable branch in the closed form is a numerical error") {
    const auto r = run_cli("fluct --lambda 2 --n 100");
    REQUIRE(r.code == 3);
    CHECK(error_of(r)["kind"] == "numerical");
  }
  SECTION("missing config file") {
    const auto r = run_cli("stability --config /nonexistent/mix.json");
    REQUIRE(r.code == 2);
    CHECK_THAT(error_of(r)["message"].get<std::string>(),
               ContainsSubstring("cannot open"));
  }
  SECTION("unknown config key") {
    const fs::path cfg = scratch_dir() / "bad_key.json";
    {
      std::ofstream f(cfg);
      f << R"({"zeta": 1.0})";
    }
    const auto r = run_cli("stability --config " + cfg.string());
    REQUIRE(r.code == 2);
    CHECK_THAT(error_of(r)["message"].get<std::string>(),
               ContainsSubstring("zeta"));
  }
  SECTION("mixed full and shorthand keys in one config") {
    const fs::path cfg = scratch_dir() / "mixed.json";
    {
      std::ofstream f(cfg);
      f << R"({"m1": 1.0, "g": 1.0})";
    }
    const auto r = run_cli("stability --config " + cfg.string());
    REQUIRE(r.code == 2);
    CHECK_THAT(error_of(r)["message"].get<std::string>(),
               ContainsSubstring("mixes"));
  }
  SECTION("descending scan window") {
    const auto r = run_cli("scan --param g12 --start 1 --stop -1");
    REQUIRE(r.code == 2);
  }
  SECTION("droplet parameter validation") {
    REQUIRE(run_cli("droplet --g 0").code == 2);
    REQUIRE(run_cli("droplet --dg 2.5 --branch minus").code == 2);
  }
  SECTION("unbalanced parameters for a balanced-only subcommand") {
    const auto r = run_cli("spectrum --m1 1 --m2 2");
    REQUIRE(r.code == 2);
    CHECK_THAT(error_of(r)["message"].get<std::string>(),
               ContainsSubstring("m1"));
  }
  SECTION("explicit fluctuations conflict with the closed-form source") {
    const auto r = run_cli("stability --fluct closed_form --nt12 0.1");
    REQUIRE(r.code == 2);
  }
}
