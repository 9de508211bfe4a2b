#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "origami/error.hpp"
#include "origami/runner.hpp"

using namespace origami;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("origami_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int shell(const std::string& cmd) {
  int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const std::string cli = ORIGAMI_CLI_PATH;

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# experiment\n"
      "[global]\n"
      "seed = 42\n"
      "jobs = 2\n"
      "out-dir = \"results\"\n"
      "\n"
      "[task]\n"
      "name = verify\n"
      "subtask = tiles\n"
      "; comment\n"
      "trials = 100\n");
  ExperimentConfig cfg = parse_config(in, "inline");
  CHECK(cfg.task == "verify");
  CHECK(cfg.subtask == "tiles");
  CHECK(cfg.global.seed == 42);
  CHECK(cfg.global.jobs == 2);
  CHECK(cfg.global.out_dir == "results");
  CHECK(cfg.params.at("trials") == "100");

  // the hash ignores jobs and output directory but not the seed
  ExperimentConfig other = cfg;
  other.global.jobs = 1;
  other.global.out_dir = "elsewhere";
  CHECK(config_hash(other) == config_hash(cfg));
  other.global.seed = 43;
  CHECK(config_hash(other) != config_hash(cfg));

  std::istringstream no_task("[global]\nseed = 1\n");
  CHECK_THROWS_AS(parse_config(no_task, "inline"), Error);
  std::istringstream bad_global("[global]\ncolour = red\n[task]\nname = info\n");
  CHECK_THROWS_AS(parse_config(bad_global, "inline"), Error);
}

TEST_CASE("run in process") {
  ExperimentConfig cfg;
  cfg.task = "info";
  cfg.params["origami"] = "ornithorynque";
  std::ostringstream out, err;
  CHECK(run(cfg, out, err) == kExitOk);
  std::string s = out.str();
  CHECK(s.find("n=12") != std::string::npos);
  CHECK(s.find("genus=4") != std::string::npos);
  CHECK(s.find("cones=2,2,2") != std::string::npos);
  CHECK(s.find("aut=3") != std::string::npos);

  cfg.task = "nonsense";
  CHECK(run(cfg, out, err) == kExitUsage);

  ExperimentConfig bad;
  bad.task = "act";
  bad.params["matrix"] = "2,0,0,1";
  CHECK(run(bad, out, err) == kExitGroupAction);

  ExperimentConfig hit;
  hit.task = "hitting";
  hit.params["mode"] = "lower";
  hit.params["slope"] = "golden";
  hit.params["w"] = "1";
  CHECK(run(hit, out, err) == kExitHitting);
}

TEST_CASE("command line") {
  CHECK(shell(cli + " info --origami ornithorynque") == 0);
  CHECK(shell(cli + " run --config /nonexistent/missing.toml") == kExitUsage);
  CHECK(shell(cli + " info --bogus") == kExitUsage);
  CHECK(shell(cli + " info --origami no_such_origami") != 0);
}

TEST_CASE("identical bytes for identical seeds") {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string args =
      " verify tiles --origami ornithorynque --trials 50 --out tiles.json"
      " && " + cli + " --seed 9 --out-dir ";
  for (const fs::path& dir : {a, b}) {
    std::string cmd = cli + " --seed 9 --out-dir " + dir.string() + args + dir.string() +
                      " hitting --mode records --slope golden --radii 0.2,0.1 --out rec.csv";
    REQUIRE(shell(cmd) == 0);
  }
  CHECK(slurp(a / "tiles.json") == slurp(b / "tiles.json"));
  CHECK(slurp(a / "rec.csv") == slurp(b / "rec.csv"));
  CHECK_FALSE(slurp(a / "rec.csv").empty());

  // a different seed changes the sampled segments
  fs::path c = scratch("det_c");
  REQUIRE(shell(cli + " --seed 10 --out-dir " + c.string() +
                " verify tiles --origami ornithorynque --trials 50 --out tiles.json") == 0);
  CHECK(slurp(a / "tiles.json") != slurp(c / "tiles.json"));

  // the config route writes the same report as the flags
  fs::path d = scratch("det_d");
  std::ofstream(d / "exp.ini") << "[global]\nseed = 9\nout-dir = " << d.string()
                               << "\n[task]\nname = verify\nsubtask = tiles\norigami = ornithorynque\n"
                                  "trials = 50\nout = tiles.json\n";
  REQUIRE(shell(cli + " run --config " + (d / "exp.ini").string()) == 0);
  CHECK(slurp(a / "tiles.json") == slurp(d / "tiles.json"));
}
