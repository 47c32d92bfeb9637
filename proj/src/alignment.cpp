#include "homocurve/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homocurve {
namespace {

// Weighted overlaps between q1 intervals and reparametrized q2 intervals
// inside one DP segment of k q1-intervals and l q2-intervals. Entries are
// √(l/k) · |[a, a+1] ∩ [b k/l, (b+1) k/l]| in units of 1/T.
struct SegmentTerm {
  int a;
  int b;
  double w;
};

std::vector<SegmentTerm> segment_terms(int k, int l) {
  std::vector<SegmentTerm> terms;
  const double ratio = static_cast<double>(k) / l;
  const double root_slope = std::sqrt(static_cast<double>(l) / k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < l; ++b) {
      const double lo = std::max<double>(a, b * ratio);
      const double hi = std::min<double>(a + 1, (b + 1) * ratio);
      if (hi > lo) terms.push_back({a, b, root_slope * (hi - lo)});
    }
  }
  return terms;
}

void check_grids(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorKind::GridMismatch, "alignment: grids differ");
}

// Breakpoints of the common refinement of the t-grid, γ's knots and the
// preimages of the u-grid.
std::vector<double> refinement(int t, const Reparametrization& gamma) {
  std::vector<double> ts;
  ts.reserve(2 * t + gamma.knots().size() + 2);
  for (int i = 0; i <= t; ++i) ts.push_back(i == t ? 1.0 : static_cast<double>(i) / t);
  for (int j = 1; j < t; ++j) ts.push_back(gamma.inverse_at(static_cast<double>(j) / t));
  for (auto [kt, ku] : gamma.knots()) ts.push_back(kt);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

int cell(double x, int t) { return std::clamp(static_cast<int>(std::floor(x * t)), 0, t - 1); }

SrvPair project_reparam(const SrvPair& p2, const Reparametrization& gamma) {
  if (gamma.is_identity()) return p2;
  return SrvPair{p2.start, reparam_projected(p2.q, gamma), p2.horizontal};
}

// Alternates the K-step and the DP until the squared cost stalls.
AlignmentResult alternate(const SrvPair& p1, const SrvPair& p2, bool with_start, const OptimizerConfig& cfg) {
  const double q2_sq = l2_inner(p2.q, p2.q);
  KResult k = minimize_over_K(KObjective(p1, p2, with_start), cfg);
  AlignmentResult r{k.y, Reparametrization::identity(), std::nullopt, k.f, k.converged, 0, {k.f}};
  double cost = k.f;

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    std::vector<Skew> q2y;
    q2y.reserve(p2.q.size());
    for (const Skew& q : p2.q) q2y.push_back(conjugate_any(r.y, q));
    const DpResult dp = dp_reparametrize(p1.q, q2y, cfg.dp_window);
    const double start_term = with_start ? squared_geodesic_distance(p1.start, p2.start * r.y) : 0.0;
    const double dp_cost = start_term + dp.cost;

    const SrvPair projected = project_reparam(p2, dp.gamma);
    const KObjective obj(p1, projected, q2_sq, with_start);
    k = minimize_over_K(obj, cfg, r.y);

    double next = k.f;
    Rotation next_y = k.y;
    if (dp_cost < next) {
      // K-step could not improve on the DP value (rounding only).
      next = dp_cost;
      next_y = r.y;
    }
    r.rounds = round;
    r.converged = k.converged;
    if (next <= cost) {
      r.gamma = dp.gamma;
      r.y = next_y;
    }
    r.history.push_back(std::min(next, cost));
    const double decrease = cost - next;
    cost = std::min(cost, next);
    if (decrease < cfg.round_tol) break;
  }
  r.cost = cost;
  return r;
}

}  // namespace

std::string_view mode_name(QuotientMode mode) {
  switch (mode) {
    case QuotientMode::Parametrized: return "param";
    case QuotientMode::Shape: return "shape";
    case QuotientMode::ModRotation: return "rot";
    case QuotientMode::ShapeModRotation: return "shape-rot";
  }
  return "param";
}

QuotientMode parse_mode(std::string_view name) {
  if (name == "param") return QuotientMode::Parametrized;
  if (name == "shape") return QuotientMode::Shape;
  if (name == "rot" || name == "mod-rotation") return QuotientMode::ModRotation;
  if (name == "shape-rot" || name == "shape-mod-rotation") return QuotientMode::ShapeModRotation;
  throw Error(ErrorKind::UsageError, "unknown quotient mode '" + std::string(name) + "'");
}

DpResult dp_reparametrize(std::span<const Skew> q1, std::span<const Skew> q2, int window) {
  check_grids(q1.size(), q2.size());
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "DP window must be >= 1");
  const int t = static_cast<int>(q1.size());
  const double h = 1.0 / t;

  std::vector<double> norm1(t + 1, 0.0);
  std::vector<double> norm2(t + 1, 0.0);
  for (int i = 0; i < t; ++i) {
    norm1[i + 1] = norm1[i] + q1[i].squared_norm();
    norm2[i + 1] = norm2[i] + q2[i].squared_norm();
  }
  Mat gram(t, t);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) gram(a, b) = q1[a].matrix().cwiseProduct(q2[b].matrix()).sum();
  }

  std::vector<std::vector<SegmentTerm>> terms(window * window);
  for (int k = 1; k <= window; ++k) {
    for (int l = 1; l <= window; ++l) terms[(k - 1) * window + (l - 1)] = segment_terms(k, l);
  }

  const double inf = std::numeric_limits<double>::infinity();
  const int side = t + 1;
  std::vector<double> best(side * side, inf);
  std::vector<int> from(side * side, -1);
  best[0] = 0.0;
  for (int i = 1; i <= t; ++i) {
    for (int j = 1; j <= t; ++j) {
      double cur = inf;
      int arg = -1;
      for (int k = 1; k <= std::min(window, i); ++k) {
        const int i0 = i - k;
        for (int l = 1; l <= std::min(window, j); ++l) {
          const int j0 = j - l;
          const double prev = best[i0 * side + j0];
          if (prev == inf) continue;
          double cross = 0.0;
          for (const SegmentTerm& s : terms[(k - 1) * window + (l - 1)]) cross += s.w * gram(i0 + s.a, j0 + s.b);
          const double seg = h * (norm1[i] - norm1[i0] + norm2[j] - norm2[j0] - 2.0 * cross);
          if (prev + seg < cur) {
            cur = prev + seg;
            arg = i0 * side + j0;
          }
        }
      }
      best[i * side + j] = cur;
      from[i * side + j] = arg;
    }
  }

  std::vector<std::pair<int, int>> path;
  for (int node = t * side + t; node != -1; node = from[node]) {
    path.emplace_back(node / side, node % side);
    if (node == 0) break;
  }
  std::reverse(path.begin(), path.end());
  return {Reparametrization::from_grid_path(path, t), std::max(0.0, best[t * side + t]), std::move(path)};
}

double reparam_energy(std::span<const Skew> q1, std::span<const Skew> q2, const Reparametrization& gamma) {
  check_grids(q1.size(), q2.size());
  const int t = static_cast<int>(q1.size());
  const std::vector<double> ts = refinement(t, gamma);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double len = ts[i + 1] - ts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (ts[i] + ts[i + 1]);
    const double root_slope = std::sqrt(gamma.slope_at(mid));
    const Mat diff = q1[cell(mid, t)].matrix() - root_slope * q2[cell(gamma(mid), t)].matrix();
    total += diff.squaredNorm() * len;
  }
  return total;
}

std::vector<Skew> reparam_projected(std::span<const Skew> q2, const Reparametrization& gamma) {
  const int t = static_cast<int>(q2.size());
  const int m = q2.front().dim();
  std::vector<Mat> acc(t, Mat::Zero(m, m));
  const std::vector<double> ts = refinement(t, gamma);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double len = ts[i + 1] - ts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (ts[i] + ts[i + 1]);
    acc[cell(mid, t)] += (std::sqrt(gamma.slope_at(mid)) * len * t) * q2[cell(gamma(mid), t)].matrix();
  }
  std::vector<Skew> out;
  out.reserve(t);
  for (Mat& a : acc) out.push_back(Skew::trusted(std::move(a)));
  return out;
}

AlignmentResult align_pairs(const SrvPair& p1, const SrvPair& p2, QuotientMode mode, const OptimizerConfig& cfg) {
  cfg.validate();
  if (p1.segments() != p2.segments()) throw Error(ErrorKind::GridMismatch, "alignment: grids differ");
  AlignmentResult r{Rotation::identity(p1.dim()), Reparametrization::identity(), std::nullopt, 0.0, true, 0, {}};
  switch (mode) {
    case QuotientMode::Parametrized:
    case QuotientMode::ModRotation: {
      const KResult k = minimize_over_K(KObjective(p1, p2, mode == QuotientMode::Parametrized), cfg);
      r.y = k.y;
      r.cost = k.f;
      r.converged = k.converged;
      r.history = {k.f};
      break;
    }
    case QuotientMode::Shape:
      r = alternate(p1, p2, true, cfg);
      break;
    case QuotientMode::ShapeModRotation:
      r = alternate(p1, p2, false, cfg);
      break;
  }
  if (mode == QuotientMode::ModRotation || mode == QuotientMode::ShapeModRotation) {
    // g α2(0) y = α1(0), so the start term vanishes.
    r.g = p1.start * (p2.start * r.y).inverse();
  }
  // Evaluated directly as a sum of squares, which does not cancel near zero.
  r.cost = std::sqrt(std::max(std::min(r.cost, alignment_objective(p1, p2, mode, r)), 0.0));
  return r;
}

AlignmentResult align_curves(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode,
                             const OptimizerConfig& cfg) {
  if (b1.segments() != b2.segments()) throw Error(ErrorKind::GridMismatch, "alignment: curves have different T");
  return align_pairs(srv_of(b1), srv_of(b2), mode, cfg);
}

AlignmentResult distance_shape(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg) {
  return align_curves(b1, b2, QuotientMode::Shape, cfg);
}

AlignmentResult distance_mod_rotation(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg) {
  return align_curves(b1, b2, QuotientMode::ModRotation, cfg);
}

AlignmentResult distance_mod_both(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg) {
  return align_curves(b1, b2, QuotientMode::ShapeModRotation, cfg);
}

double distance(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode, const OptimizerConfig& cfg) {
  return align_curves(b1, b2, mode, cfg).cost;
}

SrvPair aligned_pair(const SrvPair& p2, const AlignmentResult& r) {
  SrvPair base = project_reparam(p2, r.gamma);
  SrvPair out = k_action(base, r.y);
  if (r.g) out.start = *r.g * out.start;
  return out;
}

double alignment_objective(const SrvPair& p1, const SrvPair& p2, QuotientMode mode, const AlignmentResult& r) {
  std::vector<Skew> q2y;
  q2y.reserve(p2.q.size());
  for (const Skew& q : p2.q) q2y.push_back(conjugate(r.y, q));
  Rotation start2 = p2.start * r.y;
  if (r.g) start2 = *r.g * start2;
  const double start_term = squared_geodesic_distance(p1.start, start2);
  const bool reparam = mode == QuotientMode::Shape || mode == QuotientMode::ShapeModRotation;
  const double q_term = reparam ? reparam_energy(p1.q, q2y, r.gamma) : l2_squared_distance(p1.q, q2y);
  return start_term + q_term;
}

SphereCurve reparametrize_curve(const SphereCurve& beta, const Reparametrization& gamma) {
  const int t = beta.segments();
  Mat pts(t + 1, beta.ambient_dim());
  for (int i = 0; i <= t; ++i) {
    const double u = gamma(static_cast<double>(i) / t) * t;
    const int j = std::clamp(static_cast<int>(std::floor(u)), 0, t - 1);
    pts.row(i) = slerp(beta.point(j), beta.point(j + 1), u - j).transpose();
  }
  pts.row(0) = beta.points().row(0);
  pts.row(t) = beta.points().row(t);
  return SphereCurve(std::move(pts));
}

std::vector<SphereCurve> geodesic(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode,
                                  const OptimizerConfig& cfg, int steps) {
  if (mode == QuotientMode::Parametrized) return geodesic_M(b1, b2, cfg, steps);
  const AlignmentResult r = align_curves(b1, b2, mode, cfg);
  SphereCurve target = r.gamma.is_identity() ? b2 : reparametrize_curve(b2, r.gamma);
  if (r.g) target = rotate_curve(*r.g, target);
  return geodesic_M(b1, target, cfg, steps);
}

}  // namespace homocurve
