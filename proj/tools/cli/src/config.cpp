#include "rasplit/cli/config.hpp"

#include <fstream>
#include <set>

namespace rasplit::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown field '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const ExperimentSpec& s) {
  return json{{"kind", to_string(s.kind)}, {"seed", s.seed}, {"n", s.n},
              {"m", s.m},                  {"q", s.q},       {"p", s.p},
              {"consistent", s.consistent}, {"image", s.image}};
}

ExperimentSpec experiment_from_json(const json& j) {
  reject_unknown(j, {"kind", "seed", "n", "m", "q", "p", "consistent", "image"}, "experiment");
  ExperimentSpec s;
  if (j.contains("kind")) s.kind = parse_experiment(j.at("kind").get<std::string>());
  read(j, "seed", s.seed);
  read(j, "n", s.n);
  read(j, "m", s.m);
  read(j, "q", s.q);
  read(j, "p", s.p);
  read(j, "consistent", s.consistent);
  read(j, "image", s.image);
  return s;
}

json to_json(const RunConfig& c) {
  json j{{"experiment", to_json(c.experiment)},
         {"algorithm", to_string(c.algorithm)},
         {"block_size", c.block_size},
         {"cores", c.cores},
         {"gamma", c.gamma},
         {"lambda", c.lambda},
         {"max_iter", c.max_iter},
         {"target_db", c.target_db ? json(*c.target_db) : json(nullptr)},
         {"seed", c.seed},
         {"errors", {{"enabled", c.errors.enabled}, {"c0", c.errors.c0}, {"q", c.errors.q}, {"seed", c.errors.seed}}},
         {"record_every", c.record_every},
         {"use_reference", c.use_reference},
         {"reference_tol_db", c.reference_tol_db},
         {"out_dir", c.out_dir}};
  return j;
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"experiment", "algorithm", "block_size", "cores", "gamma", "lambda", "max_iter", "target_db", "seed",
                  "errors", "record_every", "use_reference", "reference_tol_db", "out_dir"},
                 "config");
  RunConfig c;
  if (j.contains("experiment")) c.experiment = experiment_from_json(j.at("experiment"));
  if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  read(j, "block_size", c.block_size);
  read(j, "cores", c.cores);
  read(j, "gamma", c.gamma);
  read(j, "lambda", c.lambda);
  read(j, "max_iter", c.max_iter);
  if (j.contains("target_db") && !j.at("target_db").is_null()) c.target_db = j.at("target_db").get<double>();
  read(j, "seed", c.seed);
  if (j.contains("errors")) {
    const json& e = j.at("errors");
    reject_unknown(e, {"enabled", "c0", "q", "seed"}, "errors");
    read(e, "enabled", c.errors.enabled);
    read(e, "c0", c.errors.c0);
    read(e, "q", c.errors.q);
    read(e, "seed", c.errors.seed);
  }
  read(j, "record_every", c.record_every);
  read(j, "use_reference", c.use_reference);
  read(j, "reference_tol_db", c.reference_tol_db);
  read(j, "out_dir", c.out_dir);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void RunConfig::validate() const {
  require(cores >= 1, "cores must be at least 1");
  require(record_every >= 1, "record_every must be at least 1");
  require(gamma > 0.0, "gamma must be positive");
  EngineParams{gamma, lambda}.validate();
  require(!target_db || use_reference, "target_db requires a reference solution");
  require(reference_tol_db <= -120.0, "reference_tol_db must be at most -120");
  if (errors.enabled) require(errors.c0 > 0.0 && errors.q > 1.0, "errors need c0 > 0 and q > 1");
  require(algorithm != Algorithm::AdaptivePD || block_size <= 1,
          "adaptive-pd activates exactly one block per iteration");
}

RunOptions RunConfig::run_options() const {
  RunOptions o;
  o.params = EngineParams{gamma, lambda};
  o.block_size = block_size;
  o.seed = seed;
  o.cores = cores;
  o.record_every = record_every;
  if (errors.enabled) o.errors = ErrorInjector::summable_gaussian(errors.c0, errors.q, errors.seed);
  o.record_objective = true;
  return o;
}

}  // namespace rasplit::cli
