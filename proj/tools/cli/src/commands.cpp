#include "rasplit/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace rasplit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string reference_key(const ExperimentSpec& spec, double tol_db) {
  std::string material = to_json(spec).dump() + "|tol=" + format_double(tol_db);
  if (!spec.image.empty()) {
    std::ifstream in(spec.image, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    material += "|image=" + hash_hex(bytes.str());
  }
  return to_string(spec.kind) + "-" + hash_hex(material);
}

ReferenceInfo obtain_reference(const Instance& inst, double tol_db, const ReferenceCache& cache) {
  ReferenceInfo info;
  info.key = reference_key(inst.spec, tol_db);
  if (inst.spec.kind == ExperimentKind::Toy) {
    info.x = Vec::Zero(1);
    return info;
  }
  if (auto x = cache.load(info.key); x && static_cast<std::size_t>(x->size()) == inst.problem.dim()) {
    info.x = std::move(*x);
    info.from_cache = true;
    return info;
  }
  ReferenceOptions opt;
  opt.tol_db = tol_db;
  const auto r = reference_solution(inst.problem, opt);
  info.x = r.x;
  info.iterations = r.iterations;
  cache.store(info.key, info.x);
  return info;
}

namespace {

json counters_json(const EngineCounters& c) {
  return json{{"iterations", c.iterations},
              {"resolvent_calls", c.resolvent_calls},
              {"gram_solves", c.gram_solves},
              {"linop_applications", c.linop_applications}};
}

double final_db(const RunResult& r) { return r.trace.empty() ? std::nan("") : r.trace.back().err_db; }

json db_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

RunOutcome run_experiment(const RunConfig& config, const ReferenceCache& cache) {
  config.validate();
  const Instance inst = build_instance(config.experiment);
  if (auto issue = compatibility_issue(config.algorithm, inst.problem); !issue.empty()) throw InvalidArgument(issue);

  RunOutcome out;
  StopRule stop;
  stop.max_iter = config.max_iter;
  stop.target_db = config.target_db;
  if (config.use_reference) {
    out.reference = obtain_reference(inst, config.reference_tol_db, cache);
    stop.reference = out.reference->x;
  }
  RunOptions opt = config.run_options();
  opt.initial_point = inst.start;
  out.result = solve(config.algorithm, inst.problem, opt, stop);

  const fs::path dir(config.out_dir);
  write_trace_csv(dir / "trace.csv", out.result.trace);
  out.summary = json{{"config", to_json(config)},
                     {"dim", inst.problem.dim()},
                     {"p", inst.problem.p()},
                     {"iterations", out.result.iterations},
                     {"target_reached", out.result.target_reached},
                     {"final_err_db", db_json(final_db(out.result))},
                     {"sim_time_s", out.result.sim_time_s},
                     {"counters", counters_json(out.result.counters)},
                     {"stored_vectors", out.result.stored_vectors},
                     {"auxiliary_vectors", out.result.auxiliary_vectors},
                     {"reference_key", out.reference ? json(out.reference->key) : json(nullptr)}};
  write_text(dir / "summary.json", out.summary.dump(2) + "\n");
  return out;
}

json compare_frameworks(const RunConfig& base, const ReferenceCache& cache) {
  base.validate();
  const Instance inst = build_instance(base.experiment);
  const std::size_t p = inst.problem.p();
  StopRule stop;
  stop.max_iter = base.max_iter;
  stop.target_db = base.target_db;
  if (base.use_reference) stop.reference = obtain_reference(inst, base.reference_tol_db, cache).x;

  json rows = json::array();
  std::vector<std::pair<std::string, Vec>> limits;
  for (Algorithm a : {Algorithm::F1, Algorithm::F2, Algorithm::F3Ex11, Algorithm::F3Ex12, Algorithm::F3Ex13}) {
    if (!compatibility_issue(a, inst.problem).empty()) continue;
    const Framework f = *framework_of(a);
    RunOptions opt = base.run_options();
    opt.initial_point = inst.start;
    opt.block_size = std::min(base.block_size, index_count(f, p));
    const RunResult r = solve(a, inst.problem, opt, stop);
    json row{{"algorithm", to_string(a)},
             {"indices", index_count(f, p)},
             {"block_size", opt.block_size == 0 ? index_count(f, p) : opt.block_size},
             {"stored_vectors", r.stored_vectors},
             {"stored_vectors_formula", stored_vector_formula(f, p)},
             {"coupling_rank", coupling_rank(f, p)},
             {"iterations", r.iterations},
             {"target_reached", r.target_reached},
             {"final_err_db", db_json(final_db(r))},
             {"sim_time_s", r.sim_time_s},
             {"counters", counters_json(r.counters)}};
    if (f == Framework::F2) {
      const double b = static_cast<double>(opt.block_size == 0 ? p + 2 : opt.block_size);
      row["gram_solves_expected"] = b / static_cast<double>(p + 2) * static_cast<double>(r.iterations);
    }
    rows.push_back(row);
    limits.emplace_back(to_string(a), r.x);
  }
  json dist = json::array();
  for (std::size_t i = 0; i < limits.size(); ++i) {
    for (std::size_t j = i + 1; j < limits.size(); ++j) {
      const double scale = std::max(limits[i].second.norm(), limits[j].second.norm());
      const double d = (limits[i].second - limits[j].second).norm();
      dist.push_back(json{{"a", limits[i].first}, {"b", limits[j].first},
                          {"relative_distance", scale > 0.0 ? d / scale : d}});
    }
  }
  json report{{"experiment", to_json(base.experiment)}, {"p", p}, {"frameworks", rows}, {"pairwise", dist}};
  write_text(fs::path(base.out_dir) / "compare.json", report.dump(2) + "\n");
  return report;
}

std::vector<Series> load_series(const std::vector<std::string>& traces, const std::vector<std::string>& labels) {
  require(!traces.empty(), "plotdata needs at least one trace");
  std::vector<Series> out;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    Series s;
    const fs::path path(traces[i]);
    if (i < labels.size()) {
      s.label = labels[i];
    } else {
      // Algorithm name from a neighbouring summary, else the file stem.
      s.label = path.stem().string();
      std::ifstream sj(path.parent_path() / "summary.json");
      if (sj) {
        try {
          s.label = json::parse(sj).at("config").at("algorithm").get<std::string>();
        } catch (const json::exception&) {
        }
      }
    }
    for (const auto& r : read_trace_csv(path)) {
      s.time_s.push_back(r.sim_time_s);
      s.err_db.push_back(r.err_db);
    }
    out.push_back(std::move(s));
  }
  // Equal labels would give duplicate columns.
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (out[i].label == out[j].label) out[i].label += "_" + std::to_string(i + 1);
  return out;
}

}  // namespace rasplit::cli
