#include "rasplit/problem.hpp"

namespace rasplit {

InclusionProblem::InclusionProblem(ResolventOp a, std::vector<Block> blocks)
    : a_(std::move(a)), blocks_(std::move(blocks)) {
  require(!blocks_.empty(), "InclusionProblem: need p >= 1 blocks");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    const std::string who = "InclusionProblem block " + std::to_string(k + 1);
    require_dim(b.link.in_dim(), a_.dim(), who + " L_k input");
    require_dim(b.op.dim(), b.link.out_dim(), who + " B_k dimension vs L_k output");
    links_.push_back(b.link);
  }
}

bool InclusionProblem::all_identity_links() const {
  for (const auto& b : blocks_) {
    if (b.link.kind() != LinearOp::Kind::Identity) return false;
  }
  return true;
}

bool InclusionProblem::is_minimization() const {
  if (!a_.is_subdifferential()) return false;
  for (const auto& b : blocks_) {
    if (!b.op.is_subdifferential()) return false;
  }
  return true;
}

std::optional<double> InclusionProblem::objective(const Vec& x) const {
  if (!is_minimization()) return std::nullopt;
  double v = *a_.value(x);
  for (const auto& b : blocks_) v += *b.op.value(b.link.apply(x));
  return v;
}

}  // namespace rasplit
