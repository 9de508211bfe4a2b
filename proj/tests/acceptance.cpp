// Acceptance report: one PASS/FAIL line per criterion.
//
//   acceptance [work_dir]
//
// Library-level criteria run in process; the experiment criteria run the CLI on the
// configs in configs/ with --out-dir work_dir/run1, then rerun everything into
// work_dir/run2 for the byte comparison.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "origami/continued_fraction.hpp"
#include "origami/error.hpp"
#include "origami/origami.hpp"
#include "origami/rng.hpp"
#include "origami/sl2.hpp"

using namespace origami;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = ORIGAMI_CLI_PATH;
const fs::path kConfigs = ORIGAMI_CONFIG_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// Runs one config into out_dir, returns the exit status.
int run_config(const std::string& name, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::string cmd = kCli + " --out-dir " + out_dir.string() + " run --config " + (kConfigs / (name + ".ini")).string() +
                    " >> " + (out_dir / "log.txt").string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("missing " + p.string());
  return json::parse(f);
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else cur += c;
  }
  out.push_back(cur);
  return out;
}

// Rows as column-name maps.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("missing " + p.string());
  std::string line;
  std::getline(f, line);
  auto header = csv_fields(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto v = csv_fields(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < v.size(); ++i) row[header[i]] = v[i];
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// ---- criteria ----

Outcome surface_invariants() {
  auto t0 = Clock::now();
  Origami x = builtin_ornithorynque();
  ConeData cd = cone_data(x);
  bool orders = cd.cones.size() == 3;
  for (const auto& c : cd.cones) orders = orders && c.order == 2;
  std::size_t aut = automorphism_group(x).size();
  double t = seconds_since(t0);
  Outcome o;
  o.pass = x.size() == 12 && orders && cd.regular_vertices == 3 && cd.genus == 4 && aut == 3 && t < 1;
  o.detail = "n=" + std::to_string(x.size()) + " cones=" + std::to_string(cd.cones.size()) + "x(order 2)" +
             " regular=" + std::to_string(cd.regular_vertices) + " genus=" + std::to_string(cd.genus) +
             " |Aut|=" + std::to_string(aut) + " time=" + fmt(t) + "s (exact, < 1 s)";
  return o;
}

Outcome fixed_point() {
  auto t0 = Clock::now();
  Origami x = builtin_ornithorynque();
  bool T = is_isomorphic(act(IntMatrix2::T(), x), x).has_value();
  bool R = is_isomorphic(act(IntMatrix2::R(), x), x).has_value();
  bool S = is_isomorphic(reflect_S(x), x).has_value();
  OrbitResult orb = orbit_enumerate(x, 1000);
  bool single = orb.complete && orb.classes.size() == 1 && is_isomorphic(orb.classes[0], x).has_value();
  double t = seconds_since(t0);
  Outcome o;
  o.pass = T && R && S && single && t < 1;
  o.detail = std::string("T:") + (T ? "fixed" : "moved") + " R:" + (R ? "fixed" : "moved") + " S:" +
             (S ? "fixed" : "moved") + " orbit=" + std::to_string(orb.classes.size()) + " time=" + fmt(t) +
             "s (exact, < 1 s)";
  return o;
}

Outcome cf_suite() {
  auto t0 = Clock::now();
  Rng rng(2024, 0);
  std::size_t slopes = 0, checks = 0, failures = 0;
  constexpr std::size_t kMaxBits = 1 << 14;
  std::size_t max_synth_depth = 0, min_synth_depth = 30;
  auto check = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  for (int trial = 0; trial < 200; ++trial) {
    bool synth = trial >= 100;
    CFSlope s = [&] {
      if (synth) {
        std::vector<Integer> prefix;
        for (long k = 0, n = rng.uniform(1, 4); k < n; ++k) prefix.push_back(rng.uniform(1, 5));
        return slope_with_type(make_rational(rng.uniform(10, 30), 10), prefix);
      }
      std::vector<Integer> qs;
      for (long k = 0, n = rng.uniform(2, 30); k < n; ++k) qs.push_back(rng.uniform(1, 20));
      return slope_from_quotients(qs);
    }();
    ++slopes;
    // synthesized denominators grow like q^w every two levels; stop once q_{n+10} passes the size cap
    std::size_t depth = s.length();
    if (synth) {
      std::size_t top = 1;
      while (top < 41 && mpz_sizeinbase(s.q(top).get_mpz_t(), 2) <= kMaxBits) ++top;
      depth = top > 11 ? std::min<std::size_t>(30, top - 11) : 0;
      max_synth_depth = std::max(max_synth_depth, depth);
      min_synth_depth = std::min(min_synth_depth, depth);
    }
    for (std::size_t n = 1; n <= depth; ++n) {
      check(s.p(n - 1) * s.q(n) - s.p(n) * s.q(n - 1) == (n % 2 == 0 ? 1 : -1));
      IntMatrix2 g = g_matrix(s.quotients(n));
      std::size_t c1 = n % 2 == 0 ? n - 1 : n, c2 = n % 2 == 0 ? n : n - 1;
      check(g.a == s.p(c1) && g.c == s.q(c1) && g.b == s.p(c2) && g.d == s.q(c2) && g.det() == 1);
      // strict bound needs a convergent beyond n + 1; equality holds when alpha = p_{n+1}/q_{n+1}
      if (!synth && n + 2 > s.length()) continue;
      Rational alpha = synth ? s.convergent(n + 10) : s.convergent(std::min(n + 10, s.length()));
      check(abs(alpha - s.convergent(n)) < Rational(1) / Rational(s.q(n) * s.q(n + 1)));
    }
  }
  double t = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && t < 60;
  o.detail = std::to_string(slopes) + " slopes (100 rational, 100 synthesized), depth <= 30, synthesized depth " +
             std::to_string(min_synth_depth) + ".." + std::to_string(max_synth_depth) + " (q_{n+10} <= 2^" +
             std::to_string(kMaxBits) + "), " +
             std::to_string(checks) + " identities, " + std::to_string(failures) + " failures, time=" + fmt(t) +
             "s (exact)";
  return o;
}

Outcome transitions(const fs::path& dir) {
  auto t0 = Clock::now();
  int rc = run_config("transitions", dir);
  double t = seconds_since(t0);
  json j = read_json(dir / "transitions.json");
  std::size_t letters = j["successors"].size();
  std::size_t samples = j["samples"];
  std::size_t contained = 0, realized = 0, claims = j["claims"].size();
  for (const auto& c : j["claims"]) {
    contained += c["contained"].get<bool>();
    realized += c["realized"].get<bool>();
  }
  Outcome o;
  o.pass = rc == 0 && letters == 12 && samples >= 12 * 10000 && claims == 12 && contained == 12 && realized == 12 &&
           t < 60;
  o.detail = std::to_string(samples) + " samples over " + std::to_string(letters) + " letters, claims contained " +
             std::to_string(contained) + "/12, realized " + std::to_string(realized) + "/12, time=" + fmt(t) +
             "s (zero violations, < 60 s)";
  return o;
}

Outcome tiles(const fs::path& dir) {
  int rc = run_config("tiles", dir);
  json j = read_json(dir / "tiles.json");
  std::size_t ts = j["shallow"]["trials"], tt = j["steep"]["trials"];
  std::size_t vs = j["shallow"]["violations"].size(), vt = j["steep"]["violations"].size();
  Outcome o;
  o.pass = rc == 0 && ts >= 1000 && tt >= 1000 && vs == 0 && vt == 0;
  o.detail = "slope in (0,1): " + std::to_string(ts) + " segments, " + std::to_string(vs) +
             " violations; slope < -1: " + std::to_string(tt) + " segments, " + std::to_string(vt) +
             " violations (zero violations)";
  return o;
}

Outcome intersections(const fs::path& dir) {
  auto t0 = Clock::now();
  int rc = run_config("intersections", dir);
  int rc2 = run_config("control", dir);
  double t = seconds_since(t0);
  json j = read_json(dir / "intersections.json"), c = read_json(dir / "control.json");
  bool pass = rc == 0 && rc2 == 0;
  std::string detail;
  for (const char* name : {"standard", "reflected"}) {
    const json& r = j[name];
    std::size_t trials = r["trials"], bad = r["non_intersecting"], cls = r["classified"],
                cls_ok = r["classified_intersecting"];
    pass = pass && trials >= 10000 && bad == 0 && cls == cls_ok;
    detail += std::string(name) + ": " + std::to_string(trials) + " pairs, " + std::to_string(bad) +
              " disjoint, classified " + std::to_string(cls_ok) + "/" + std::to_string(cls) + " intersecting; ";
  }
  std::size_t found = 0;
  for (const auto& row : c["control"]) found += row["disjoint_pair_found"].get<bool>();
  pass = pass && found == 3 && c["control"].size() == 3;
  detail += "genus-2 control: disjoint pair at " + std::to_string(found) + "/3 of K=17,34,50; time=" + fmt(t) + "s";
  return {pass, detail};
}

Outcome cylinders(const fs::path& dir) {
  int rc = run_config("cylinders", dir);
  auto rows = read_csv(dir / "cylinders.csv");
  json rep = read_json(dir / "transversal.json");
  std::set<std::set<std::size_t>> got, expected;
  long area = 0;
  bool shape = rows.size() == 2;
  for (const auto& r : rows) {
    long L = std::stol(r.at("L")), W = std::stol(r.at("W"));
    shape = shape && L == 6 && W == 1;
    area += L * W;
    std::set<std::size_t> sq;
    std::istringstream s(r.at("squares"));
    for (std::size_t j; s >> j;) sq.insert(j);
    got.insert(sq);
  }
  for (int a : {1, 0}) {
    std::set<std::size_t> sq;
    for (int i = 0; i < 3; ++i)
      for (int b : {0, 1}) sq.insert(ornithorynque_index(i, a, b));
    expected.insert(sq);
  }
  std::size_t trials = rep["trials"], viol = rep["violations"].size();
  Outcome o;
  o.pass = rc == 0 && shape && got == expected && area == 12 && trials >= 1000 && viol == 0;
  o.detail = std::to_string(rows.size()) + " cylinders, L=6 W=1: " + (shape ? "yes" : "no") +
             ", square sets match: " + (got == expected ? "yes" : "no") + ", area=" + std::to_string(area) +
             ", transversal bound: " + std::to_string(trials) + " segments, " + std::to_string(viol) +
             " violations (exact)";
  return o;
}

Outcome special_times(const fs::path& dir) {
  auto t0 = Clock::now();
  int rc = run_config("special", dir);
  double t = seconds_since(t0);
  auto rows = read_csv(dir / "special.csv");
  double worst = 0;
  bool all = rows.size() == 9;
  std::string qmax;
  for (const auto& r : rows) {
    all = all && r.at("passed") == "1";
    worst = std::max(worst, std::stod(r.at("ratio")));
    qmax = r.at("qn");
  }
  Outcome o;
  o.pass = rc == 0 && all && worst <= 1 && t < 300;
  o.detail = std::to_string(rows.size()) + " levels n=6..14 (q_n up to " + qmax + "), max T/(4K q_n)=" +
             fmt(worst) + ", time=" + fmt(t) + "s (ratio <= 1 exact, < 300 s)";
  return o;
}

Outcome lower_bound(const fs::path& dir) {
  auto t0 = Clock::now();
  int rc1 = run_config("lower_13", dir);
  int rc2 = run_config("lower_11", dir);
  double t = seconds_since(t0);
  bool pass = rc1 == 0 && rc2 == 0 && t < 900;
  std::string detail;
  std::size_t levels = 0;
  for (const char* name : {"lower_13", "lower_11"}) {
    for (const auto& r : read_csv(dir / (std::string(name) + ".csv"))) {
      ++levels;
      bool ok = r.at("measured_ok") == "1" && r.at("trapping_ok") == "1";
      pass = pass && ok;
      detail += "q=" + r.at("q2k") + ": T=" + r.at("T") + " >= " + fmt(std::stod(r.at("bound"))) +
                " certified " + fmt(std::stod(r.at("certified_T"))) + " trapping " +
                (r.at("trapping_ok") == "1" ? "ok" : "fail") + " tube " + (r.at("tube_ok") == "1" ? "ok" : "fail") +
                "; ";
    }
  }
  pass = pass && levels > 0;
  detail += "time=" + fmt(t) + "s (T >= q^2/sqrt 8 exact, < 900 s, 256 MB flags)";
  return {pass, detail};
}

Outcome exponents(const fs::path& dir) {
  auto t0 = Clock::now();
  int g1 = run_config("golden_records", dir), g2 = run_config("golden_fit", dir);
  int w1 = run_config("w2_records", dir), w2 = run_config("w2_fit", dir);
  double t = seconds_since(t0);
  json gf = read_json(dir / "golden_fit.json"), wf = read_json(dir / "w2_fit.json");
  double Hg = gf["H"], Hw = wf["H"];
  bool golden_ok = g1 == 0 && g2 == 0 && Hg >= 0.85 && Hg <= 1.3;
  bool envelope_ok = w1 == 0 && w2 == 0 && Hw >= 1.6;

  // per-point exponents at the special radii of the two largest q_2k present
  CFSlope s = parse_slope_spec("type:w=2;prefix=[1,3]");
  std::vector<std::pair<long, double>> special;  // q, exponent
  for (const auto& p : wf["per_point"]) {
    double r = p["r"];
    for (std::size_t k = 1; s.q(2 * k) <= 1000; ++k) {
      double q = s.q(2 * k).get_d();
      if (std::abs(r * q * std::sqrt(32.0) - 1) < 1e-9) special.push_back({long(q), p["exponent"]});
    }
  }
  std::sort(special.begin(), special.end());
  bool per_ok = special.size() >= 2;
  std::string per;
  for (std::size_t i = special.size() >= 2 ? special.size() - 2 : 0; i < special.size(); ++i) {
    per_ok = per_ok && special[i].second >= 1.6;
    per += " q=" + std::to_string(special[i].first) + ":" + fmt(special[i].second);
  }
  Outcome o;
  o.pass = golden_ok && envelope_ok && per_ok;
  o.detail = "golden H=" + fmt(Hg) + " in [0.85,1.3]: " + (golden_ok ? "yes" : "no") + "; w=2 envelope H=" + fmt(Hw) +
             " >= 1.6: " + (envelope_ok ? "yes" : "no") + "; per-point" + per + " >= 1.6: " + (per_ok ? "yes" : "no") +
             "; time=" + fmt(t) + "s";
  return o;
}

const std::vector<std::string> kAllConfigs = {"transitions", "tiles",   "intersections",  "control",
                                              "cylinders",   "special", "lower_13",       "lower_11",
                                              "golden_records", "golden_fit", "w2_records", "w2_fit"};

Outcome determinism(const fs::path& run1, const fs::path& run2) {
  for (const auto& name : kAllConfigs) run_config(name, run2);
  std::size_t files = 0, same = 0;
  std::string diffs;
  for (const auto& e : fs::directory_iterator(run1)) {
    if (e.path().filename() == "log.txt") continue;
    ++files;
    fs::path other = run2 / e.path().filename();
    if (fs::exists(other) && slurp(e.path()) == slurp(other)) ++same;
    else diffs += " " + e.path().filename().string();
  }
  Outcome o;
  o.pass = files > 0 && same == files;
  o.detail = std::to_string(same) + "/" + std::to_string(files) + " CSV/JSON/SVG artifacts byte-identical on rerun" +
             (diffs.empty() ? "" : ", differing:" + diffs);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(work);
  fs::path run1 = work / "run1", run2 = work / "run2";
  fs::create_directories(run1);

  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
  };
  std::vector<Criterion> all = {
      {"surface invariants", surface_invariants},
      {"SL(2,Z) fixed point", fixed_point},
      {"continued fractions", cf_suite},
      {"transition relation", [&] { return transitions(run1); }},
      {"tile lemmas", [&] { return tiles(run1); }},
      {"intersection property", [&] { return intersections(run1); }},
      {"cylinders", [&] { return cylinders(run1); }},
      {"special-time upper bound", [&] { return special_times(run1); }},
      {"lower bound", [&] { return lower_bound(run1); }},
      {"exponent estimates", [&] { return exponents(run1); }},
      {"determinism", [&] { return determinism(run1, run2); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    try {
      o = all[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed == 0 ? 0 : 1;
}
