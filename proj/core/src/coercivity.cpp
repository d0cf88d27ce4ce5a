#include "rasplit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace rasplit {

bool CoercivityReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

using Bound = std::function<double(const Vec&)>;

struct Witness {
  std::string name;
  Bound bound;
};

// Coordinates covered by norm blocks on coordinate selections, and the smallest weight.
std::optional<double> cover_weight(const InclusionProblem& pb) {
  std::vector<bool> covered(pb.dim(), false);
  double w = std::numeric_limits<double>::infinity();
  for (const auto& b : pb.blocks()) {
    if (b.op.kind() != ResolventOp::Kind::ProxNorm) continue;
    if (b.link.kind() == LinearOp::Kind::Select) {
      for (auto j : *b.link.indices()) covered[j] = true;
    } else if (b.link.kind() == LinearOp::Kind::Identity) {
      std::fill(covered.begin(), covered.end(), true);
    } else {
      continue;
    }
    w = std::min(w, b.op.weight());
  }
  if (std::all_of(covered.begin(), covered.end(), [](bool c) { return c; }) && std::isfinite(w)) return w;
  return std::nullopt;
}

}  // namespace

CoercivityReport check_coercivity_witness(const InclusionProblem& pb, std::uint64_t seed, std::size_t probes) {
  CoercivityReport rep;
  if (!pb.is_minimization()) {
    rep.checks.push_back({"minimization instance", false, "some operator is not a known subdifferential"});
    return rep;
  }

  bool all_real = true;
  std::ostringstream not_real;
  for (std::size_t k = 0; k < pb.p(); ++k) {
    if (!pb.block(k).op.real_valued()) {
      all_real = false;
      not_real << " g_" << k + 1 << "=" << pb.block(k).op.name();
    }
  }
  rep.checks.push_back({"g_k real-valued", all_real, all_real ? "all " + std::to_string(pb.p()) + " terms finite"
                                                              : "extended-valued:" + not_real.str()});

  const bool g_nonneg = std::all_of(pb.blocks().begin(), pb.blocks().end(), [](const Block& b) {
    return b.op.nonnegative();
  });
  const double n = static_cast<double>(pb.dim());
  std::vector<Witness> ws;
  if (g_nonneg && pb.a().nonnegative()) {
    if (auto q = pb.a().quadratic_params()) {
      const double alpha = q->first;
      const Vec c = q->second;
      ws.push_back({"objective >= (alpha/2)||x - c||^2", [alpha, c](const Vec& x) {
                      return 0.5 * alpha * (x - c).squaredNorm();
                    }});
    }
    if (pb.a().kind() == ResolventOp::Kind::ProxNorm) {
      const double w = pb.a().weight();
      ws.push_back({"objective >= alpha||x||", [w](const Vec& x) { return w * x.norm(); }});
    }
    if (auto w = cover_weight(pb)) {
      const double c = *w / n;
      ws.push_back({"objective >= ||x||/(qN) via group cover", [c](const Vec& x) { return c * x.norm(); }});
    }
  }

  if (ws.empty()) {
    rep.checks.push_back({"coercive lower bound", false, "no witness applies (f and g_k give no growing bound)"});
    return rep;
  }

  // Probe each bound along random rays at growing radii.
  Stream s(seed, 0xC0E);
  for (const auto& w : ws) {
    bool ok = true;
    double worst = 0.0;
    for (std::size_t t = 0; t < probes && ok; ++t) {
      Vec d(static_cast<Eigen::Index>(pb.dim()));
      for (auto& v : d) v = s.normal();
      d.normalize();
      for (double r : {1e-2, 1.0, 1e2, 1e4}) {
        const Vec x = r * d;
        const double obj = *pb.objective(x);
        const double lb = w.bound(x);
        const double slack = obj - lb;
        worst = std::min(worst, slack / std::max(1.0, std::abs(obj)));
        if (slack < -1e-9 * std::max(1.0, std::abs(obj))) ok = false;
      }
    }
    std::ostringstream detail;
    detail << probes << " rays, worst relative slack " << worst;
    rep.checks.push_back({w.name, ok, detail.str()});
  }
  return rep;
}

}  // namespace rasplit
