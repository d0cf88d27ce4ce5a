#pragma once

#include "rasplit/linops.hpp"
#include "rasplit/resolvents.hpp"

#include <optional>
#include <vector>

namespace rasplit {

struct Block {
  ResolventOp op;
  LinearOp link;
};

/// 0 in A x + sum_k L_k^* B_k(L_k x).
class InclusionProblem {
 public:
  InclusionProblem(ResolventOp a, std::vector<Block> blocks);

  const ResolventOp& a() const { return a_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(std::size_t k) const { return blocks_[k]; }
  const std::vector<LinearOp>& links() const { return links_; }
  std::size_t dim() const { return a_.dim(); }
  std::size_t p() const { return blocks_.size(); }
  bool all_identity_links() const;

  /// f(x) + sum g_k(L_k x) when every operator is a known subdifferential.
  std::optional<double> objective(const Vec& x) const;
  bool is_minimization() const;

 private:
  ResolventOp a_;
  std::vector<Block> blocks_;
  std::vector<LinearOp> links_;
};

}  // namespace rasplit
