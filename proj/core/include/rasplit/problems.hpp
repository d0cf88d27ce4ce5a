#pragma once

#include "rasplit/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rasplit {

enum class ExperimentKind { Toy, SignalRestoration, GroupLasso, HingeSVM, PhaseRecon };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

/// Scale parameters; zero means the builder default.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Toy;
  std::uint64_t seed = 0;
  std::size_t n = 0;     // signal length, feature count, or image side
  std::size_t m = 0;     // observations / rows
  std::size_t q = 0;     // groups
  std::size_t p = 0;     // samples (hinge)
  bool consistent = false;  // phase: zero every noise field
  std::string image;     // phase: optional P5 raster

  bool operator==(const ExperimentSpec&) const = default;
};

/// The 1-D inclusion 0 in d|x| + (x - 1), whose only zero is 0.
InclusionProblem build_toy();
/// Start used for the toy problem; 0 is the solution itself.
inline constexpr double kToyStart = 1.0;

struct SignalRestoration {
  InclusionProblem problem;
  Vec truth;
  std::vector<Vec> observations;
  std::vector<double> blur_std;
  double alpha = 0.05;
};
SignalRestoration build_signal_restoration(std::size_t n = 1000, std::size_t m = 10, std::uint64_t seed = 0);

struct GroupLasso {
  InclusionProblem problem;
  Vec truth;
  RowMajorMat a;
  Vec b;
  std::vector<std::vector<std::size_t>> groups;  // 0-based
  std::size_t data_blocks = 0;
  double alpha = 0.0;
};
GroupLasso build_group_lasso(std::size_t m = 1200, std::size_t n = 3610, std::size_t q = 40,
                             std::uint64_t seed = 0);

struct HingeSVM {
  InclusionProblem problem;
  std::vector<Vec> features;
  std::vector<double> labels;
  double alpha = 1.0;
};
HingeSVM build_hinge_svm(std::size_t n = 1500, std::size_t p = 750, std::uint64_t seed = 0,
                         double alpha = 1.0);

struct PhaseRecon {
  InclusionProblem problem;
  Vec truth;
  BoxSet box;
  double rho = 0.0;  // mean pixel value of the truth
  std::vector<Vec> observations;
};
/// `image` is an 8-bit raster of side*side pixels; a phantom is synthesized when empty.
PhaseRecon build_phase_recon(std::size_t side = 32, std::uint64_t seed = 0,
                             const std::optional<Vec>& image = std::nullopt, bool consistent = false);

/// Seeded piecewise-smooth test image with values in [0, 255].
Vec phantom(std::size_t side, std::uint64_t seed);

/// Binary PGM (P5, maxval 255), row-major.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  Vec pixels;
};
Raster read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Raster& r);

/// Everything a driver needs to run one experiment.
struct Instance {
  ExperimentSpec spec;
  InclusionProblem problem;
  std::optional<Vec> truth;
  std::optional<BoxSet> box;
  std::optional<Vec> start;  // preferred initial point (zero when absent)
};
Instance build_instance(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Reference solutions

struct ReferenceOptions {
  double tol_db = -200.0;
  std::uint64_t max_iter = 1'000'000;
  std::optional<Vec> initial_point;
};

struct ReferenceResult {
  Vec x;
  std::uint64_t iterations = 0;
  double last_change_db = 0.0;
};

class ReferenceNotConverged : public Error {
 public:
  ReferenceNotConverged(Vec last, double change_db, const std::string& what)
      : Error(what), last_iterate(std::move(last)), last_change_db(change_db) {}
  Vec last_iterate;
  double last_change_db;
};

/// Framework 1, full activation, gamma = 1, lambda = 1.9, until the
/// relative change of x1 drops below 10^(tol_db/20).
ReferenceResult reference_solution(const InclusionProblem& problem, const ReferenceOptions& options = {});

// ---------------------------------------------------------------------------
// Coercivity witnesses

struct WitnessCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CoercivityReport {
  std::vector<WitnessCheck> checks;
  bool passed() const;
};

/// Lower-bound witnesses for the objective (probed on random rays) plus
/// real-valuedness of every g_k.
CoercivityReport check_coercivity_witness(const InclusionProblem& problem, std::uint64_t seed = 0,
                                          std::size_t probes = 64);

}  // namespace rasplit
