#include "rasplit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rasplit {

namespace {

// Stream identifiers, one per generated data field.
enum StreamId : std::uint64_t {
  kSignalLevels = 0x5101,
  kSignalEdges = 0x5102,
  kSignalBlur = 0x5103,
  kSignalNoise = 0x5104,
  kLassoMatrix = 0x5201,
  kLassoTruth = 0x5202,
  kLassoNoise = 0x5203,
  kHingeFeatures = 0x5301,
  kHingeLabels = 0x5302,
  kPhaseNoise = 0x5401,
  kPhaseThetaNoise = 0x5402,
  kPhantom = 0x5403,
};

Vec uniform_vec(Stream& s, std::size_t n, double lo, double hi) {
  Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = s.uniform(lo, hi);
  return v;
}

std::size_t scaled_round(double x, std::size_t floor) {
  return std::max(floor, static_cast<std::size_t>(std::llround(x)));
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Toy: return "toy";
    case ExperimentKind::SignalRestoration: return "signal";
    case ExperimentKind::GroupLasso: return "group-lasso";
    case ExperimentKind::HingeSVM: return "hinge";
    case ExperimentKind::PhaseRecon: return "phase";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::Toy, ExperimentKind::SignalRestoration, ExperimentKind::GroupLasso,
                 ExperimentKind::HingeSVM, ExperimentKind::PhaseRecon}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown experiment '" + s + "' (toy, signal, group-lasso, hinge, phase)");
}

InclusionProblem build_toy() {
  return InclusionProblem(ResolventOp::norm(1),
                          {Block{ResolventOp::quadratic(1.0, Vec::Ones(1)), LinearOp::identity(1)}});
}

SignalRestoration build_signal_restoration(std::size_t n, std::size_t m, std::uint64_t seed) {
  require(n >= 8, "signal restoration: N must be at least 8");
  require(m >= 1, "signal restoration: M must be at least 1");
  SignalRestoration out{InclusionProblem(ResolventOp::zero(1), {Block{ResolventOp::zero(1), LinearOp::identity(1)}}),
                        Vec(), {}, {}, 0.05};

  // Six plateaus at seeded levels, edges at seeded positions.
  constexpr std::size_t kPlateaus = 6;
  Stream levels(seed, kSignalLevels), edges(seed, kSignalEdges);
  std::vector<std::size_t> cut{0};
  for (std::size_t i = 1; i < kPlateaus; ++i) {
    const double centre = static_cast<double>(i) / kPlateaus;
    const double jitter = edges.uniform(-0.25, 0.25) / kPlateaus;
    cut.push_back(static_cast<std::size_t>(std::floor((centre + jitter) * static_cast<double>(n))));
  }
  cut.push_back(n);
  out.truth = Vec::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < kPlateaus; ++i) {
    const double level = levels.uniform();
    for (std::size_t j = cut[i]; j < cut[i + 1]; ++j) out.truth[static_cast<Eigen::Index>(j)] = level;
  }

  constexpr double kNoise = 0.1, kXi = 0.07;
  Stream blur(seed, kSignalBlur), noise(seed, kSignalNoise);
  const GridShape shape{1, n};
  std::vector<Block> blocks;
  for (std::size_t l = 0; l < m; ++l) {
    const double stddev = blur.uniform(20.0, 40.0) * static_cast<double>(n) / 1000.0;
    out.blur_std.push_back(stddev);
    LinearOp op = LinearOp::circulant(kernels::gaussian(shape, stddev), shape);
    Stream ns = noise.child(l);
    Vec r = op.apply(out.truth) + uniform_vec(ns, n, -kNoise, kNoise);
    blocks.push_back(Block{ResolventOp::dist_interval(r.array() - kXi, r.array() + kXi), op});
    out.observations.push_back(std::move(r));
  }
  out.problem = InclusionProblem(ResolventOp::norm(n, out.alpha), std::move(blocks));
  return out;
}

GroupLasso build_group_lasso(std::size_t m, std::size_t n, std::size_t q, std::uint64_t seed) {
  require(m >= 1 && q >= 1, "group lasso: M and q must be positive");
  const double f = static_cast<double>(n) / (90.0 * static_cast<double>(q) + 10.0);
  const std::size_t stride = scaled_round(90.0 * f, 1);
  const std::size_t overlap = static_cast<std::size_t>(std::llround(10.0 * f));
  require((q - 1) * stride < n, "group lasso: too many groups for N");

  GroupLasso out{InclusionProblem(ResolventOp::zero(1), {Block{ResolventOp::zero(1), LinearOp::identity(1)}}),
                 Vec(), RowMajorMat(), Vec(), {}, 0, 5.0 / static_cast<double>(q * q)};

  Stream sa(seed, kLassoMatrix), sx(seed, kLassoTruth), sw(seed, kLassoNoise);
  // Second parameter of N(mu, v) is the variance.
  out.a.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.a.rows(); ++i)
    for (Eigen::Index j = 0; j < out.a.cols(); ++j) out.a(i, j) = sa.normal(1.0, std::sqrt(10.0));
  out.truth = uniform_vec(sx, n, 0.0, 10.0);
  out.b = out.a * out.truth;
  for (auto& bi : out.b) bi += sw.normal(0.0, std::sqrt(0.1));

  for (std::size_t k = 0; k < q; ++k) {
    const std::size_t first = k * stride;
    const std::size_t last = k + 1 == q ? n : std::min(n, first + stride + overlap);
    std::vector<std::size_t> g(last - first);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = first + j;
    out.groups.push_back(std::move(g));
  }

  auto parent = std::make_shared<const RowMajorMat>(out.a);
  out.data_blocks = std::min(m, scaled_round(30.0 * static_cast<double>(m) / 1200.0, 1));
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < out.data_blocks; ++k) {
    const std::size_t first = k * m / out.data_blocks;
    const std::size_t last = (k + 1) * m / out.data_blocks;
    blocks.push_back(Block{ResolventOp::quadratic(out.alpha, out.b.segment(static_cast<Eigen::Index>(first),
                                                                             static_cast<Eigen::Index>(last - first))),
                           LinearOp::row_block(parent, first, last - first)});
  }
  for (const auto& g : out.groups) {
    blocks.push_back(Block{ResolventOp::norm(g.size(), 1.0 / static_cast<double>(q)), LinearOp::select(g, n)});
  }
  out.problem = InclusionProblem(ResolventOp::zero(n), std::move(blocks));
  return out;
}

HingeSVM build_hinge_svm(std::size_t n, std::size_t p, std::uint64_t seed, double alpha) {
  require(n >= 1 && p >= 1, "hinge: N and p must be positive");
  HingeSVM out{InclusionProblem(ResolventOp::zero(1), {Block{ResolventOp::zero(1), LinearOp::identity(1)}}), {}, {},
               alpha};
  Stream su(seed, kHingeFeatures), sl(seed, kHingeLabels);
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < p; ++k) {
    Vec u(static_cast<Eigen::Index>(n));
    for (auto& x : u) x = su.normal(100.0, std::sqrt(10.0));
    const double xi = sl.below(2) == 0 ? -1.0 : 1.0;
    blocks.push_back(Block{ResolventOp::hinge(xi, u, 1.0 / static_cast<double>(p)), LinearOp::identity(n)});
    out.features.push_back(std::move(u));
    out.labels.push_back(xi);
  }
  out.problem = InclusionProblem(ResolventOp::quadratic(alpha, Vec::Zero(static_cast<Eigen::Index>(n))),
                                 std::move(blocks));
  return out;
}

Vec phantom(std::size_t side, std::uint64_t seed) {
  require(side >= 4, "phantom: side must be at least 4");
  Stream s(seed, kPhantom);
  const double sd = static_cast<double>(side);
  Vec img(static_cast<Eigen::Index>(side * side));
  const double g0 = s.uniform(60.0, 110.0), gx = s.uniform(-40.0, 40.0), gy = s.uniform(-40.0, 40.0);
  struct Ellipse {
    double cx, cy, rx, ry, level;
  };
  std::vector<Ellipse> shapes;
  for (int i = 0; i < 4; ++i) {
    shapes.push_back({s.uniform(0.2, 0.8), s.uniform(0.2, 0.8), s.uniform(0.08, 0.3), s.uniform(0.08, 0.3),
                      s.uniform(-60.0, 120.0)});
  }
  const double rx0 = s.uniform(0.1, 0.4), ry0 = s.uniform(0.1, 0.4);
  const double rx1 = rx0 + s.uniform(0.15, 0.4), ry1 = ry0 + s.uniform(0.15, 0.4);
  const double rect_level = s.uniform(40.0, 100.0);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / sd, x = (static_cast<double>(c) + 0.5) / sd;
      double v = g0 + gx * x + gy * y + 20.0 * std::sin(2.0 * std::numbers::pi * (x + 0.5 * y));
      for (const auto& e : shapes) {
        const double dx = (x - e.cx) / e.rx, dy = (y - e.cy) / e.ry;
        if (dx * dx + dy * dy <= 1.0) v += e.level;
      }
      if (x >= rx0 && x <= rx1 && y >= ry0 && y <= ry1) v += rect_level;
      img[static_cast<Eigen::Index>(r * side + c)] = std::round(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

PhaseRecon build_phase_recon(std::size_t side, std::uint64_t seed, const std::optional<Vec>& image,
                             bool consistent) {
  require(side >= 4, "phase reconstruction: side must be at least 4");
  const std::size_t n = side * side;
  const GridShape shape{side, side};
  PhaseRecon out{InclusionProblem(ResolventOp::zero(1), {Block{ResolventOp::zero(1), LinearOp::identity(1)}}), Vec(),
                 BoxSet{Vec::Zero(static_cast<Eigen::Index>(n)), Vec::Constant(static_cast<Eigen::Index>(n), 255.0)},
                 0.0, {}};
  if (image) {
    require_dim(static_cast<std::size_t>(image->size()), n, "phase reconstruction image");
    out.truth = *image;
  } else {
    out.truth = phantom(side, seed);
  }
  require((out.truth.array() >= 0.0).all() && (out.truth.array() <= 255.0).all(),
          "phase reconstruction: image values must lie in [0, 255]");
  out.rho = out.truth.mean();

  // Kernel sizes scale with side/256.
  const double scale = static_cast<double>(side) / 256.0;
  const double g_std = std::max(1.0, 3.0 * scale);
  const std::size_t v_len = scaled_round(20.0 * scale, 2);
  const std::size_t h_len = scaled_round(24.0 * scale, 2);
  require(v_len <= side && h_len <= side, "phase reconstruction: blur longer than the image side");

  const LinearOp gauss = LinearOp::circulant(kernels::gaussian(shape, g_std), shape);
  const LinearOp vert = LinearOp::circulant(kernels::uniform_vertical(shape, v_len), shape);
  const LinearOp horiz = LinearOp::circulant(kernels::uniform_horizontal(shape, h_len), shape);

  Stream noise(seed, kPhaseNoise);
  std::vector<Block> blocks;
  auto observe = [&](std::size_t k, const LinearOp& op, double amp, bool hard) {
    Vec y = op.apply(out.truth);
    if (!consistent) {
      Stream ns = noise.child(k);
      y += uniform_vec(ns, n, -amp, amp);
    }
    Vec r(y.size());
    for (Eigen::Index j = 0; j < y.size(); ++j) r[j] = hard ? std::clamp(y[j], 0.0, 60.0) : soft_clip(90.0, y[j]);
    blocks.push_back(Block{hard ? ResolventOp::hard_clip(r, 60.0) : ResolventOp::soft_clip(r, 90.0), op});
    out.observations.push_back(std::move(r));
  };
  for (std::size_t k = 0; k < 20; ++k) observe(k, gauss, 50.0, true);
  for (std::size_t k = 20; k < 40; ++k) observe(k, vert, 70.0, false);
  for (std::size_t k = 40; k < 60; ++k) observe(k, horiz, 90.0, false);

  const LinearOp ones = LinearOp::inner_product(Vec::Ones(static_cast<Eigen::Index>(n)));
  const double target = ones.apply(out.truth)[0];
  blocks.push_back(Block{ResolventOp::mean_constraint(target), ones});
  out.observations.push_back(Vec::Constant(1, target));

  Vec corrupted = out.truth;
  if (!consistent) {
    Stream tn(seed, kPhaseThetaNoise);
    corrupted += uniform_vec(tn, n, -3.0, 3.0);
  }
  auto cone = std::make_shared<const PhaseConstraint>(shape, PhaseConstraint::phase_of(shape, corrupted));
  blocks.push_back(Block{ResolventOp::phase(cone), LinearOp::identity(n)});
  out.observations.push_back(Vec::Zero(static_cast<Eigen::Index>(n)));

  out.problem = InclusionProblem(ResolventOp::box(n, 0.0, 255.0), std::move(blocks));
  return out;
}

Instance build_instance(const ExperimentSpec& spec) {
  auto pick = [](std::size_t v, std::size_t def) { return v == 0 ? def : v; };
  switch (spec.kind) {
    case ExperimentKind::Toy:
      return Instance{spec, build_toy(), Vec::Zero(1), std::nullopt, Vec::Constant(1, kToyStart)};
    case ExperimentKind::SignalRestoration: {
      auto s = build_signal_restoration(pick(spec.n, 1000), pick(spec.m, 10), spec.seed);
      return Instance{spec, std::move(s.problem), std::move(s.truth), std::nullopt, std::nullopt};
    }
    case ExperimentKind::GroupLasso: {
      auto g = build_group_lasso(pick(spec.m, 1200), pick(spec.n, 3610), pick(spec.q, 40), spec.seed);
      return Instance{spec, std::move(g.problem), std::move(g.truth), std::nullopt, std::nullopt};
    }
    case ExperimentKind::HingeSVM: {
      auto h = build_hinge_svm(pick(spec.n, 1500), pick(spec.p, 750), spec.seed);
      return Instance{spec, std::move(h.problem), std::nullopt, std::nullopt, std::nullopt};
    }
    case ExperimentKind::PhaseRecon: {
      const std::size_t side = pick(spec.n, 32);
      std::optional<Vec> img;
      if (!spec.image.empty()) {
        Raster r = read_pgm(spec.image);
        require(r.width == side && r.height == side,
                "phase reconstruction: raster is " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                    ", expected side " + std::to_string(side));
        img = std::move(r.pixels);
      }
      auto ph = build_phase_recon(side, spec.seed, img, spec.consistent);
      return Instance{spec, std::move(ph.problem), std::move(ph.truth), std::move(ph.box), std::nullopt};
    }
  }
  throw InvalidArgument("unknown experiment kind");
}

}  // namespace rasplit
