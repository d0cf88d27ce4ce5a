#include "rasplit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace rasplit {

namespace {
constexpr std::uint64_t kActivationStream = 0xAC7;
constexpr std::uint64_t kErrorStream = 0xE77;
}  // namespace

std::string to_string(Framework f) {
  switch (f) {
    case Framework::F1: return "f1";
    case Framework::F2: return "f2";
    case Framework::F3Ex11: return "f3-ex11";
    case Framework::F3Ex12: return "f3-ex12";
    case Framework::F3Ex13: return "f3-ex13";
  }
  return "?";
}

std::optional<Framework> parse_framework(const std::string& s) {
  for (auto f : {Framework::F1, Framework::F2, Framework::F3Ex11, Framework::F3Ex12, Framework::F3Ex13}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::size_t coupling_rank(Framework f, std::size_t p) {
  switch (f) {
    case Framework::F1: return p;
    case Framework::F2: return 0;
    case Framework::F3Ex11:
    case Framework::F3Ex12: return p;
    case Framework::F3Ex13: return p + 1;
  }
  return 0;
}

std::size_t index_count(Framework f, std::size_t p) {
  switch (f) {
    case Framework::F1: return p + 1;
    case Framework::F2: return p + 2;
    default: return p + 1 + coupling_rank(f, p);
  }
}

std::size_t stored_vector_formula(Framework f, std::size_t p) {
  switch (f) {
    case Framework::F1: return 2 * p + 3;
    case Framework::F2: return 4 * p + 5;
    default: return 2 * p + 2 * coupling_rank(f, p) + 2;
  }
}

ActivationSchedule::ActivationSchedule(std::size_t n_indices, std::size_t block_size, std::uint64_t seed)
    : n_(n_indices), b_(block_size), stream_(seed, kActivationStream) {
  require(n_ >= 1, "ActivationSchedule: need at least one index");
  require(b_ >= 1 && b_ <= n_, "ActivationSchedule: block size must lie in [1, n_indices]");
}

Mask ActivationSchedule::draw(std::uint64_t d) const {
  Stream s = stream_.child(d);
  return random_subset_mask(n_, b_, s);
}

Mask ActivationSchedule::sample() { return draw(next_++); }

ErrorInjector ErrorInjector::summable_gaussian(double c0, double q, std::uint64_t seed) {
  require(c0 >= 0.0 && std::isfinite(c0), "ErrorInjector: c0 must be nonnegative");
  require(q > 1.0, "ErrorInjector: decay exponent must exceed 1");
  ErrorInjector e;
  e.mode_ = Mode::SummableGaussian;
  e.c0_ = c0;
  e.q_ = q;
  e.seed_ = seed;
  return e;
}

double ErrorInjector::bound(std::uint64_t n) const {
  if (!active()) return 0.0;
  return c0_ / std::pow(static_cast<double>(n) + 1.0, q_);
}

Vec ErrorInjector::draw(ErrorSeq seq, std::uint64_t n, std::size_t index, std::size_t dim) const {
  Vec g = Vec::Zero(static_cast<Eigen::Index>(dim));
  if (!active() || dim == 0) return g;
  Stream s = Stream(seed_, kErrorStream).child(static_cast<std::uint64_t>(seq)).child(index).child(n);
  for (auto& gi : g) gi = s.normal();
  const double nrm = g.norm();
  if (nrm == 0.0) return Vec::Zero(static_cast<Eigen::Index>(dim));
  const double u = s.uniform();
  return (bound(n) * u / nrm) * g;
}

void ErrorInjector::perturb(ErrorSeq seq, std::uint64_t n, std::size_t index, Vec& v) const {
  if (active()) v += draw(seq, n, index, static_cast<std::size_t>(v.size()));
}

EngineParams::EngineParams(double gamma_, double lambda_) : gamma(gamma_), lambda(lambda_) { validate(); }

void EngineParams::validate() const {
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive and finite");
  require(lambda > 0.0 && lambda < 2.0, "relaxation lambda must lie in ]0,2[");
}

void IterationCost::reset(std::size_t n) {
  shared = 0.0;
  per_index.assign(n, 0.0);
}

double IterationCost::makespan(std::size_t cores) const {
  std::vector<double> jobs;
  for (double c : per_index)
    if (c > 0.0) jobs.push_back(c);
  std::sort(jobs.begin(), jobs.end(), std::greater<>());
  std::vector<double> load(std::max<std::size_t>(cores, 1), 0.0);
  for (double j : jobs) *std::min_element(load.begin(), load.end()) += j;
  return shared + (load.empty() ? 0.0 : *std::max_element(load.begin(), load.end()));
}

}  // namespace rasplit
