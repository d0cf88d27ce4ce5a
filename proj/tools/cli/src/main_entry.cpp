#include "rasplit/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace rasplit::cli {

namespace {

// Flags shared by run, reference and compare. Unset flags leave the config alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> experiment, algo, image, out;
  std::optional<std::size_t> block, cores, n, m, q, p;
  std::optional<std::uint64_t> seed, data_seed, max_iter, record_every;
  std::optional<double> gamma, lambda, target_db, errors_c0, errors_q, ref_tol_db;
  bool consistent = false, no_reference = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration");
    app->add_option("--experiment", experiment, "toy | signal | group-lasso | hinge | phase");
    app->add_option("--algo", algo, "f1 | f2 | f3-ex11 | f3-ex12 | f3-ex13 | adaptive-pd | rbcfb");
    app->add_option("--block", block, "indices activated per iteration (0 = all)");
    app->add_option("--cores", cores, "cores of the simulated-time model");
    app->add_option("--seed", seed, "activation seed (also the data seed unless --data-seed)");
    app->add_option("--data-seed", data_seed, "instance seed");
    app->add_option("--gamma", gamma);
    app->add_option("--lambda", lambda);
    app->add_option("--max-iter", max_iter);
    app->add_option("--target-db", target_db);
    app->add_option("--record-every", record_every);
    app->add_option("--n", n, "signal length, features, or image side");
    app->add_option("--m", m, "observations or rows");
    app->add_option("--q", q, "groups");
    app->add_option("--p", p, "samples");
    app->add_option("--image", image, "P5 raster for the phase experiment");
    app->add_flag("--consistent", consistent, "zero every noise field (phase)");
    app->add_option("--errors-c0", errors_c0, "enable summable Gaussian errors with this c0");
    app->add_option("--errors-q", errors_q, "decay exponent of injected errors");
    app->add_flag("--no-reference", no_reference, "skip the reference solution");
    app->add_option("--ref-tol-db", ref_tol_db, "reference stopping tolerance in dB");
    app->add_option("--out", out, "output directory");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (experiment) c.experiment.kind = parse_experiment(*experiment);
    if (algo) c.algorithm = parse_algorithm(*algo);
    if (block) c.block_size = *block;
    if (cores) c.cores = *cores;
    if (seed) {
      c.seed = *seed;
      c.experiment.seed = *seed;
    }
    if (data_seed) c.experiment.seed = *data_seed;
    if (gamma) c.gamma = *gamma;
    if (lambda) c.lambda = *lambda;
    if (max_iter) c.max_iter = *max_iter;
    if (target_db) c.target_db = *target_db;
    if (record_every) c.record_every = *record_every;
    if (n) c.experiment.n = *n;
    if (m) c.experiment.m = *m;
    if (q) c.experiment.q = *q;
    if (p) c.experiment.p = *p;
    if (image) c.experiment.image = *image;
    if (consistent) c.experiment.consistent = true;
    if (errors_c0) {
      c.errors.enabled = true;
      c.errors.c0 = *errors_c0;
    }
    if (errors_q) c.errors.q = *errors_q;
    if (no_reference) c.use_reference = false;
    if (ref_tol_db) c.reference_tol_db = *ref_tol_db;
    if (out) c.out_dir = *out;
    return c;
  }
};

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Randomly activated splitting solvers and experiment harness"};
  app.require_subcommand(1);

  Overrides run_o, ref_o, cmp_o;
  auto* run_cmd = app.add_subcommand("run", "run one algorithm and write trace.csv and summary.json");
  run_o.attach(run_cmd);
  auto* ref_cmd = app.add_subcommand("reference", "compute or load the cached reference solution");
  ref_o.attach(ref_cmd);
  auto* cmp_cmd = app.add_subcommand("compare", "run every compatible framework and write compare.json");
  cmp_o.attach(cmp_cmd);

  std::vector<std::string> traces, labels;
  std::string plot_out = "plot.csv";
  auto* plot_cmd = app.add_subcommand("plotdata", "merge traces into (time, dB) columns");
  plot_cmd->add_option("traces", traces, "trace.csv files")->required();
  plot_cmd->add_option("--labels", labels, "column labels")->delimiter(',');
  plot_cmd->add_option("--out", plot_out, "output CSV");

  std::uint64_t validate_seed = 0;
  auto* val_cmd = app.add_subcommand("validate", "run the invariant suite");
  val_cmd->add_option("--seed", validate_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (*run_cmd) {
      const RunConfig c = run_o.resolve();
      const RunOutcome r = run_experiment(c, ReferenceCache());
      std::cout << to_string(c.algorithm) << " on " << to_string(c.experiment.kind) << ": " << r.result.iterations
                << " iterations, final " << format_double(r.summary["final_err_db"].is_null()
                                                              ? std::nan("")
                                                              : r.summary["final_err_db"].get<double>())
                << " dB, target " << (r.result.target_reached ? "reached" : "not reached") << ", wall "
                << r.result.wall_time_s << " s, simulated " << r.result.sim_time_s << " s\n";
      if (r.reference) std::cout << "reference " << r.reference->key << (r.reference->from_cache ? " (cached)" : "") << '\n';
      return kOk;
    }
    if (*ref_cmd) {
      const RunConfig c = ref_o.resolve();
      c.validate();
      const Instance inst = build_instance(c.experiment);
      const ReferenceCache cache;
      const ReferenceInfo info = obtain_reference(inst, c.reference_tol_db, cache);
      std::ostringstream body;
      for (double v : info.x) body << format_double(v) << '\n';
      write_text(std::filesystem::path(c.out_dir) / "reference.csv", body.str());
      std::cout << "reference " << info.key << (info.from_cache ? " (cached)" : "") << ", dim " << info.x.size()
                << ", norm " << format_double(info.x.norm());
      if (info.iterations) std::cout << ", " << info.iterations << " iterations";
      std::cout << '\n';
      return kOk;
    }
    if (*cmp_cmd) {
      const auto report = compare_frameworks(cmp_o.resolve(), ReferenceCache());
      std::cout << report.dump(2) << '\n';
      return kOk;
    }
    if (*plot_cmd) {
      write_plot_data(plot_out, load_series(traces, labels));
      return kOk;
    }
    if (*val_cmd) return validate_invariants(std::cout, validate_seed) == 0 ? kOk : kCheckFailed;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const ReferenceNotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDiverged;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kDiverged;
  } catch (const Error& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  return kOk;
}

}  // namespace rasplit::cli
