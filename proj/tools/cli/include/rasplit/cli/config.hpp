#pragma once

#include "rasplit/algorithms.hpp"
#include "rasplit/problems.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace rasplit::cli {

struct ErrorConfig {
  bool enabled = false;
  double c0 = 1.0;
  double q = 2.0;
  std::uint64_t seed = 0;

  bool operator==(const ErrorConfig&) const = default;
};

struct RunConfig {
  ExperimentSpec experiment;
  Algorithm algorithm = Algorithm::F1;
  std::size_t block_size = 0;  // 0: all indices
  std::size_t cores = 1;
  double gamma = 1.0;
  double lambda = 1.9;
  std::uint64_t max_iter = 10000;
  std::optional<double> target_db;
  std::uint64_t seed = 0;
  ErrorConfig errors;
  std::uint64_t record_every = 1;
  bool use_reference = true;
  double reference_tol_db = -200.0;
  std::string out_dir = ".";

  bool operator==(const RunConfig&) const = default;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
  RunOptions run_options() const;
};

nlohmann::json to_json(const ExperimentSpec& s);
ExperimentSpec experiment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
/// Missing fields keep their defaults; unknown fields are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace rasplit::cli
