#pragma once

#include "rasplit/cli/config.hpp"
#include "rasplit/cli/io.hpp"

#include <iosfwd>

namespace rasplit::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidConfig = 2, kDiverged = 3 };

/// Cache key: experiment (plus raster bytes, if any) and tolerance.
std::string reference_key(const ExperimentSpec& spec, double tol_db);

struct ReferenceInfo {
  Vec x;
  std::string key;
  bool from_cache = false;
  std::uint64_t iterations = 0;
};

/// Known zero for the toy problem; otherwise loaded from or stored to the cache.
ReferenceInfo obtain_reference(const Instance& inst, double tol_db, const ReferenceCache& cache);

struct RunOutcome {
  RunResult result;
  std::optional<ReferenceInfo> reference;
  nlohmann::json summary;
};

/// Builds the instance, runs the configured algorithm, and writes
/// <out_dir>/trace.csv and <out_dir>/summary.json.
RunOutcome run_experiment(const RunConfig& config, const ReferenceCache& cache);

/// Runs every compatible framework on the base instance and writes
/// <out_dir>/compare.json. Returns the report.
nlohmann::json compare_frameworks(const RunConfig& base, const ReferenceCache& cache);

/// Reads traces and labels them (label list may be shorter than the paths).
std::vector<Series> load_series(const std::vector<std::string>& traces, const std::vector<std::string>& labels);

/// Quick invariant suite; prints one line per check and returns the number of failures.
int validate_invariants(std::ostream& out, std::uint64_t seed);

/// Full command-line entry point.
int cli_main(int argc, char** argv);

}  // namespace rasplit::cli
