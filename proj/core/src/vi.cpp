#include "rasplit/engine.hpp"

#include <cmath>
#include <limits>

namespace rasplit {

double vi_residual(const BoxSet& c, const InclusionProblem& problem, const Vec& x,
                   std::size_t probe_count, std::uint64_t seed) {
  require(probe_count >= 1, "vi_residual: probe_count must be at least 1");
  require_dim(static_cast<std::size_t>(c.lo.size()), problem.dim(), "vi_residual box");
  require_dim(static_cast<std::size_t>(x.size()), problem.dim(), "vi_residual point");
  const Vec xc = c.project(x);

  Vec g = Vec::Zero(xc.size());
  for (const auto& b : problem.blocks()) {
    auto val = b.op.evaluate(b.link.apply(xc));
    if (!val) throw InvalidArgument("vi_residual: operator " + b.op.name() + " is not single-valued");
    g += b.link.adjoint_apply(*val);
  }

  // The linear form -<y - x, g> is maximized over the box at a vertex.
  double best = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (g[j] > 0.0) best += g[j] * (xc[j] - c.lo[j]);
    else if (g[j] < 0.0) best += g[j] * (xc[j] - c.hi[j]);
  }
  if (std::isnan(best)) best = std::numeric_limits<double>::infinity();

  Stream s(seed, 0x71);
  for (std::size_t t = 1; t < probe_count; ++t) {
    Vec y(xc.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double lo = std::isfinite(c.lo[j]) ? c.lo[j] : xc[j] - 1.0;
      const double hi = std::isfinite(c.hi[j]) ? c.hi[j] : xc[j] + 1.0;
      y[j] = s.uniform(lo, hi);
    }
    best = std::max(best, -(y - xc).dot(g));
  }
  return std::max(0.0, best);
}

}  // namespace rasplit
