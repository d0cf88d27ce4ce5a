#pragma once

#include "rasplit/baselines.hpp"

#include <string>

namespace rasplit {

enum class Algorithm { F1, F2, F3Ex11, F3Ex12, F3Ex13, AdaptivePD, RBCFB };

std::string to_string(Algorithm a);
/// Accepts f1, f2, f3-ex11, f3-ex12, f3-ex13, adaptive-pd, rbcfb.
Algorithm parse_algorithm(const std::string& s);
std::optional<Framework> framework_of(Algorithm a);
const std::vector<Algorithm>& all_algorithms();

/// Empty when `a` can run on `problem`, otherwise the reason it cannot.
std::string compatibility_issue(Algorithm a, const InclusionProblem& problem);

/// Dispatches to the engine or a baseline. options.framework is overridden.
RunResult solve(Algorithm a, const InclusionProblem& problem, RunOptions options, const StopRule& stop);

}  // namespace rasplit
