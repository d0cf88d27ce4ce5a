#include "rasplit/algorithms.hpp"

namespace rasplit {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AdaptivePD: return "adaptive-pd";
    case Algorithm::RBCFB: return "rbcfb";
    default: return to_string(*framework_of(a));
  }
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::F1,     Algorithm::F2,         Algorithm::F3Ex11, Algorithm::F3Ex12,
                                          Algorithm::F3Ex13, Algorithm::AdaptivePD, Algorithm::RBCFB};
  return all;
}

Algorithm parse_algorithm(const std::string& s) {
  for (auto a : all_algorithms())
    if (to_string(a) == s) return a;
  throw InvalidArgument("unknown algorithm '" + s + "' (f1, f2, f3-ex11, f3-ex12, f3-ex13, adaptive-pd, rbcfb)");
}

std::optional<Framework> framework_of(Algorithm a) {
  switch (a) {
    case Algorithm::F1: return Framework::F1;
    case Algorithm::F2: return Framework::F2;
    case Algorithm::F3Ex11: return Framework::F3Ex11;
    case Algorithm::F3Ex12: return Framework::F3Ex12;
    case Algorithm::F3Ex13: return Framework::F3Ex13;
    default: return std::nullopt;
  }
}

std::string compatibility_issue(Algorithm a, const InclusionProblem& problem) {
  if ((a == Algorithm::F3Ex12 || a == Algorithm::F3Ex13) && !problem.all_identity_links())
    return to_string(a) + " requires every L_k to be the identity";
  if (a == Algorithm::AdaptivePD && !problem.is_minimization())
    return "adaptive-pd requires a minimization problem";
  return {};
}

RunResult solve(Algorithm a, const InclusionProblem& problem, RunOptions options, const StopRule& stop) {
  if (auto issue = compatibility_issue(a, problem); !issue.empty()) throw InvalidArgument(issue);
  switch (a) {
    case Algorithm::AdaptivePD: return run_adaptive_pd(problem, options, stop);
    case Algorithm::RBCFB: return run_rbcfb(problem, options, stop);
    default:
      options.framework = *framework_of(a);
      return run(problem, options, stop);
  }
}

}  // namespace rasplit
