#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace origami {

struct GlobalOptions {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::size_t mem_budget = std::size_t(256) << 20;  // bytes per worker
  std::string out_dir = ".";
};

/// One task with its flags. Keys are flag names without the leading dashes.
struct ExperimentConfig {
  std::string task;     // info, act, orbit, cf, flow, cutseq, verify, cylinders, hitting, exponent
  std::string subtask;  // verify: transitions, tiles, intersections, control
  std::map<std::string, std::string> params;
  GlobalOptions global;
};

/// Sections [global] (seed, jobs, mem-budget, out-dir) and [task] (name, subtask, then
/// task flags). Lines are `key = value`; `#` and `;` start comments. Throws Parse.
ExperimentConfig read_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in, const std::string& source);

/// Stable hash of task, flags and seed (not jobs or output directory).
std::string config_hash(const ExperimentConfig& cfg);

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitSurface = 10,
  kExitGroupAction = 11,
  kExitArithmetic = 12,
  kExitFlow = 13,
  kExitVerify = 14,
  kExitCylinders = 15,
  kExitHitting = 16,
};

/// Runs the task, writing declared files under out_dir and a summary to `out`.
/// Returns kExitOk iff every embedded check passed.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace origami
