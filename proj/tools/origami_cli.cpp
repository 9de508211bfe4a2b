// Command-line front end: every subcommand maps its flags 1:1 onto an ExperimentConfig.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "origami/runner.hpp"

namespace {

struct Sub {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> flags;  // name, help
  bool positional_subtask = false;
};

const std::vector<Sub>& subcommands() {
  static const std::vector<Sub> subs = {
      {"info", "surface invariants", {{"origami", "builtin name or file"}, {"out", "JSON report"}}},
      {"act",
       "apply a matrix of SL(2,Z)",
       {{"origami", "builtin name or file"}, {"matrix", "a,b,c,d"}, {"out", "origami file for the image"}}},
      {"orbit", "SL(2,Z) orbit up to isomorphism", {{"origami", "builtin name or file"}, {"cap", "class cap"}, {"out", "output directory"}}},
      {"cf",
       "continued fractions and convergents",
       {{"rational", "p/q"}, {"type", "diophantine type w"}, {"prefix", "[a1,...]"}, {"slope", "slope spec"},
        {"depth", "number of quotients"}, {"out", "CSV n,a,p,q"}}},
      {"flow",
       "edge crossings of a straight flow",
       {{"origami", "builtin name or file"}, {"slope", "slope spec"}, {"direction", "dx,dy"}, {"depth", "convergent depth"},
        {"start", "j,x,y"}, {"crossings", "crossing limit"}, {"time", "time limit"}, {"out", "CSV events"}}},
      {"cutseq",
       "cutting sequence of a segment",
       {{"origami", "builtin name or file"}, {"slope", "slope spec"}, {"direction", "dx,dy"}, {"depth", "convergent depth"},
        {"start", "j,x,y"}, {"length", "segment length"}, {"out", "CSV letters"}}},
      {"verify",
       "transitions | tiles | intersections | control",
       {{"origami", "builtin name or file"}, {"cone", "a,b"}, {"grid", "samples per side"}, {"rounds", "refinement rounds"},
        {"trials", "trial count"}, {"K", "length bound (list for control)"}, {"cones", "standard|reflected|both"},
        {"out", "JSON report"}},
       true},
      {"cylinders",
       "cylinder decomposition in the direction A*0",
       {{"origami", "builtin name or file"}, {"matrix", "a,b,c,d"}, {"horizontal", "use A*inf"}, {"out", "CSV cylinders"},
        {"transversal-trials", "random transversal segments"}, {"qmax", "largest q"}, {"report", "JSON report"}}},
      {"hitting",
       "r-dense times",
       {{"origami", "builtin name or file"}, {"slope", "slope spec"}, {"mode", "records|special|lower"},
        {"radii", "auto or r1,r2,..."}, {"rmax", "auto grid top"}, {"rmin", "auto grid bottom"}, {"count", "auto grid size"},
        {"cap", "time cap"}, {"start", "j,x,y"}, {"denominator", "random start denominator"}, {"K", "special-time constant"},
        {"nmin", "first level"}, {"nmax", "last level"}, {"w", "type"}, {"qmin", "smallest q_2k"}, {"qmax", "largest q_2k"},
        {"out", "CSV table"}, {"records", "CSV records for special/lower"}}},
      {"exponent",
       "hitting exponent fit",
       {{"in", "records CSV"}, {"out", "JSON fit"}, {"plot", "SVG plot"}, {"min-H", "required lower bound"},
        {"max-H", "required upper bound"}}},
  };
  return subs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Square-tiled surface toolkit"};
  app.require_subcommand(1);
  origami::GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", global.jobs, "worker threads")->capture_default_str();
  app.add_option("--mem-budget", global.mem_budget, "bytes of cell flags per worker")->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "directory for relative output paths")->capture_default_str();

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> subtasks;
  std::vector<CLI::App*> apps;
  for (const auto& s : subcommands()) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->fallthrough();
    if (s.positional_subtask) sc->add_option("what", subtasks[s.name], s.help)->required();
    for (const auto& [flag, help] : s.flags) sc->add_option(std::string("--") + flag, values[s.name][flag], help);
    apps.push_back(sc);
  }
  std::string config_path;
  CLI::App* run_cmd = app.add_subcommand("run", "run a task from a config file");
  run_cmd->fallthrough();
  run_cmd->add_option("--config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : origami::kExitUsage;
  }

  origami::ExperimentConfig cfg;
  if (run_cmd->parsed()) {
    try {
      cfg = origami::read_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return origami::kExitUsage;
    }
    // command-line globals override the file when given
    auto over = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (over("--seed")) cfg.global.seed = global.seed;
    if (over("--jobs")) cfg.global.jobs = global.jobs;
    if (over("--mem-budget")) cfg.global.mem_budget = global.mem_budget;
    if (over("--out-dir")) cfg.global.out_dir = global.out_dir;
  } else {
    for (CLI::App* sc : apps) {
      if (!sc->parsed()) continue;
      cfg.task = sc->get_name();
      cfg.subtask = subtasks[cfg.task];
      for (const auto& [flag, value] : values[cfg.task])
        if (sc->get_option(std::string("--") + flag)->count() > 0) cfg.params[flag] = value;
    }
    cfg.global = global;
  }
  return origami::run(cfg, std::cout, std::cerr);
}
