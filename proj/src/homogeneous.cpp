#include "homocurve/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace homocurve {
namespace {

constexpr double kUnitTol = 1e-10;
constexpr double kHorizontalResidual = 1e-9;
constexpr int kReorthonormalizeEvery = 100;
constexpr int kSo2Samples = 360;
constexpr int kSo2Refine = 4;

Rotation reorthonormalize_k(const Rotation& y) {
  const int n = y.dim() - 1;
  const Rotation block = nearest_rotation(y.matrix().topLeftCorner(n, n));
  Mat m = Mat::Identity(n + 1, n + 1);
  m.topLeftCorner(n, n) = block.matrix();
  return Rotation::trusted(std::move(m));
}

double so2_angle(const Rotation& y) { return std::atan2(y(1, 0), y(0, 0)); }

struct Descent {
  Rotation y;
  double f;
  bool converged;
  int iterations;
};

Descent descend(const KObjective& obj, Rotation y, const OptimizerConfig& cfg, std::mt19937_64& rng) {
  double f = obj.value(y);
  double eps = cfg.step;
  const double eps_max = 1e3 * cfg.step;
  int accepted = 0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    Skew grad;
    try {
      grad = obj.gradient(y);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AngleAmbiguity) throw;
      // Nudge off the cut locus of the start term and continue.
      const int n = obj.dim() - 1;
      std::normal_distribution<double> normal(0.0, 1e-6);
      Mat v = Mat::Zero(n + 1, n + 1);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          v(i, j) = normal(rng);
          v(j, i) = -v(i, j);
        }
      }
      y = y * group_exp(Skew::trusted(std::move(v)));
      f = obj.value(y);
      continue;
    }
    if (grad.norm() < cfg.grad_tol) return {y, f, true, it};
    bool moved = false;
    while (eps > 1e-16) {
      Rotation cand = y * group_exp(grad * (-eps));
      const double fc = obj.value(cand);
      if (fc <= f + 1e-15 * (1.0 + std::abs(f))) {
        y = std::move(cand);
        f = fc;
        moved = true;
        eps = std::min(eps * 1.25, eps_max);
        if (++accepted % kReorthonormalizeEvery == 0) y = reorthonormalize_k(y);
        break;
      }
      eps *= 0.5;
    }
    if (!moved) break;
  }
  const bool converged = obj.gradient(y).norm() < cfg.grad_tol;
  return {y, f, converged, it};
}

std::pair<double, double> golden_section(const KObjective& obj, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = obj.value_so2(c);
  double fd = obj.value_so2(d);
  while (b - a > 1e-11) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj.value_so2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj.value_so2(d);
    }
  }
  double theta = 0.5 * (a + b);
  double f = obj.value_so2(theta);

  // Golden section stalls at √ε in θ; secant steps on the analytic
  // derivative reach full precision.
  const Skew z = group_log(so2_in_k(0.5)) * 2.0;
  auto slope = [&](double t) { return inner(obj.gradient(so2_in_k(t)), z); };
  double t0 = theta;
  double g0 = slope(t0);
  double t1 = theta + 1e-7;
  double g1 = slope(t1);
  for (int it = 0; it < 8 && g1 != g0; ++it) {
    const double t2 = t1 - g1 * (t1 - t0) / (g1 - g0);
    if (!std::isfinite(t2) || std::abs(t2 - theta) > 1e-4) break;
    t0 = t1;
    g0 = g1;
    t1 = t2;
    g1 = slope(t1);
    if (g1 == 0.0) break;
  }
  const double f1 = obj.value_so2(t1);
  if (f1 <= f + 1e-15 * (1.0 + std::abs(f)) && std::abs(g1) < std::abs(slope(theta))) {
    theta = t1;
    f = f1;
  }
  return {theta, f};
}

KResult minimize_sampled(const KObjective& obj, const std::optional<Rotation>& warm) {
  if (obj.dim() != 3 || !obj.reduced()) {
    throw Error(ErrorKind::InvalidArgument, "sampled K-solver requires n = 2 and horizontal data");
  }
  const double h = 2.0 * std::numbers::pi / kSo2Samples;
  std::vector<double> vals(kSo2Samples);
  for (int i = 0; i < kSo2Samples; ++i) vals[i] = obj.value_so2(i * h);

  std::vector<int> minima;
  for (int i = 0; i < kSo2Samples; ++i) {
    const double prev = vals[(i + kSo2Samples - 1) % kSo2Samples];
    const double next = vals[(i + 1) % kSo2Samples];
    if (vals[i] <= prev && vals[i] <= next) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  if (minima.size() > kSo2Refine) minima.resize(kSo2Refine);

  double best_theta = 0.0;
  double best_f = std::numeric_limits<double>::infinity();
  auto consider = [&](double theta, double f) {
    if (f < best_f) {
      best_f = f;
      best_theta = theta;
    }
  };
  for (int i : minima) {
    consider(i * h, vals[i]);
    auto [theta, f] = golden_section(obj, i * h - h, i * h + h);
    consider(theta, f);
  }
  if (warm) {
    const double theta0 = so2_angle(*warm);
    consider(theta0, obj.value_so2(theta0));
    auto [theta, f] = golden_section(obj, theta0 - h, theta0 + h);
    consider(theta, f);
  }
  return {so2_in_k(best_theta), best_f, true, kSo2Samples};
}

}  // namespace

SphereCurve::SphereCurve(Mat points) : points_(std::move(points)) {
  if (points_.rows() < 2 || points_.cols() < 2) {
    throw Error(ErrorKind::InvalidArgument, "sphere curve needs >= 2 samples in dimension >= 2");
  }
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if (std::abs(points_.row(i).norm() - 1.0) > kUnitTol) {
      throw Error(ErrorKind::NotAUnitVector, "sample " + std::to_string(i) + " is not a unit vector");
    }
    if (i > 0 && 1.0 + points_.row(i).dot(points_.row(i - 1)) <= 1e-12) {
      throw Error(ErrorKind::AntipodalPoints,
                  "samples " + std::to_string(i - 1) + " and " + std::to_string(i) + " are antipodal");
    }
  }
}

Vec north_pole(int ambient_dim) {
  Vec n = Vec::Zero(ambient_dim);
  n(ambient_dim - 1) = 1.0;
  return n;
}

Vec slerp(const Vec& a, const Vec& b, double s) {
  const double angle = sphere_angle(a, b);
  if (angle < 1e-15) return a;
  const double sa = std::sin(angle);
  Vec out = (std::sin((1.0 - s) * angle) / sa) * a + (std::sin(s * angle) / sa) * b;
  return out / out.norm();
}

double sphere_angle(const Vec& a, const Vec& b) {
  // Accurate for nearly parallel and nearly antipodal vectors alike.
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

SphereCurve rotate_curve(const Rotation& g, const SphereCurve& beta) {
  Mat pts = beta.points() * g.matrix().transpose();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i).normalize();
  return SphereCurve(std::move(pts));
}

SphereCurve project_pi(const GroupCurve& alpha) {
  const int m = alpha.dim();
  Mat pts(alpha.samples.size(), m);
  for (std::size_t i = 0; i < alpha.samples.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) = alpha.samples[i].matrix().col(m - 1).transpose();
  }
  return SphereCurve(std::move(pts));
}

Rotation lift_initial(const Vec& b0) {
  const int m = static_cast<int>(b0.size());
  if (1.0 + b0(m - 1) <= 1e-12) {
    Mat a = Mat::Identity(m, m);
    a(0, 0) = -1.0;
    a(m - 1, m - 1) = -1.0;
    return Rotation::trusted(std::move(a));
  }
  return efficient_rotation(north_pole(m), b0);
}

GroupCurve horizontal_lift(const SphereCurve& beta) { return horizontal_lift(beta, lift_initial(beta.point(0))); }

GroupCurve horizontal_lift(const SphereCurve& beta, const Rotation& start) {
  const int m = beta.ambient_dim();
  if (start.dim() != m) throw Error(ErrorKind::DimensionMismatch, "initial lift has wrong dimension");
  if ((start.matrix().col(m - 1) - beta.point(0)).norm() > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "initial lift does not project to the first sample");
  }
  GroupCurve out;
  out.samples.reserve(beta.segments() + 1);
  out.samples.push_back(start);
  for (int i = 0; i < beta.segments(); ++i) {
    Rotation next = efficient_rotation(beta.point(i), beta.point(i + 1)) * out.samples.back();
    if ((i + 1) % kReorthonormalizeEvery == 0) next = nearest_rotation(next.matrix());
    out.samples.push_back(std::move(next));
  }
  return out;
}

namespace {
SrvPair horizontalize(SrvPair pair) {
  pair.horizontal = true;
  for (Skew& q : pair.q) {
    if (proj_k(q).norm() < kHorizontalResidual) {
      q = proj_kperp(q);
    } else {
      pair.horizontal = false;
    }
  }
  return pair;
}
}  // namespace

SrvPair srv_of(const SphereCurve& beta) { return horizontalize(q_map(horizontal_lift(beta))); }

SrvPair srv_of(const SphereCurve& beta, const Rotation& start) {
  return horizontalize(q_map(horizontal_lift(beta, start)));
}

SphereCurve curve_of(const SrvPair& pair) { return project_pi(q_inverse(pair)); }

SrvPair k_action(const SrvPair& pair, const Rotation& y) {
  if (!in_k(y)) throw Error(ErrorKind::YNotInK, "k_action: element is not in the embedded SO(n)");
  SrvPair out{pair.start * y, {}, pair.horizontal};
  out.q.reserve(pair.q.size());
  for (const Skew& q : pair.q) {
    Skew c = conjugate_any(y, q);
    out.q.push_back(pair.horizontal ? proj_kperp(c) : Skew(c.matrix()));
  }
  return out;
}

void OptimizerConfig::validate() const {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(grad_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "grad_tol must be positive");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
  if (multistarts < 1) throw Error(ErrorKind::InvalidArgument, "multistarts must be >= 1");
  if (dp_window < 1) throw Error(ErrorKind::InvalidArgument, "dp_window must be >= 1");
  if (max_rounds < 1) throw Error(ErrorKind::InvalidArgument, "max_rounds must be >= 1");
}

KObjective::KObjective(const SrvPair& p1, const SrvPair& p2, bool with_start)
    : start1_(p1.start), start2_(p2.start), q1_(p1.q), q2_(p2.q), with_start_(with_start) {
  if (p1.segments() != p2.segments()) throw Error(ErrorKind::GridMismatch, "K-objective: grids differ");
  q2_sq_ = l2_inner(q2_, q2_);
  reduced_ = p1.horizontal && p2.horizontal;
  prepare();
}

KObjective::KObjective(const SrvPair& p1, const SrvPair& p2_projected, double q2_squared_norm,
                       bool with_start)
    : start1_(p1.start),
      start2_(p2_projected.start),
      q1_(p1.q),
      q2_(p2_projected.q),
      q2_sq_(q2_squared_norm),
      with_start_(with_start) {
  if (p1.segments() != p2_projected.segments()) {
    throw Error(ErrorKind::GridMismatch, "K-objective: grids differ");
  }
  reduced_ = p1.horizontal && p2_projected.horizontal;
  prepare();
}

void KObjective::prepare() {
  if (start1_.dim() != start2_.dim()) throw Error(ErrorKind::DimensionMismatch, "K-objective: dimensions differ");
  q1_sq_ = l2_inner(q1_, q1_);
  start_product_ = start1_.matrix().transpose() * start2_.matrix();
  if (reduced_) {
    const int n = dim() - 1;
    cross_ = Mat::Zero(n, n);
    for (std::size_t k = 0; k < q1_.size(); ++k) {
      cross_.noalias() += kperp_coords(q2_[k]) * kperp_coords(q1_[k]).transpose();
    }
    cross_ /= static_cast<double>(q1_.size());
  }
}

double KObjective::value(const Rotation& y) const {
  double f = q1_sq_ + q2_sq_;
  if (with_start_) f += squared_geodesic_distance(start1_, start2_ * y);
  if (reduced_) {
    const int n = dim() - 1;
    f -= 4.0 * y.matrix().topLeftCorner(n, n).cwiseProduct(cross_).sum();
  } else {
    double cross = 0.0;
    for (std::size_t k = 0; k < q1_.size(); ++k) cross += inner(q1_[k], conjugate_any(y, q2_[k]));
    f -= 2.0 * cross / static_cast<double>(q1_.size());
  }
  return f;
}

double KObjective::value_so2(double theta) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double f = q1_sq_ + q2_sq_ - 4.0 * (c * (cross_(0, 0) + cross_(1, 1)) + s * (cross_(1, 0) - cross_(0, 1)));
  if (with_start_) {
    // P = α1(0)ᵗ α2(0) y; the rotation angle of P gives d² = 2θ².
    const Mat& p = start_product_;
    const double p00 = c * p(0, 0) + s * p(0, 1), p01 = -s * p(0, 0) + c * p(0, 1);
    const double p10 = c * p(1, 0) + s * p(1, 1), p11 = -s * p(1, 0) + c * p(1, 1);
    const double p20 = c * p(2, 0) + s * p(2, 1), p21 = -s * p(2, 0) + c * p(2, 1);
    const double p02 = p(0, 2), p12 = p(1, 2), p22 = p(2, 2);
    const double cs = 0.5 * (p00 + p11 + p22 - 1.0);
    const double wx = p21 - p12, wy = p02 - p20, wz = p10 - p01;
    const double sn = 0.5 * std::sqrt(wx * wx + wy * wy + wz * wz);
    const double angle = std::atan2(sn, cs);
    f += 2.0 * angle * angle;
  }
  return f;
}

Skew KObjective::gradient(const Rotation& y) const {
  const int m = dim();
  const int n = m - 1;
  Mat g = Mat::Zero(m, m);
  if (with_start_) {
    const LogResult lr = group_log_flagged((start2_ * y).inverse() * start1_);
    if (lr.ambiguous) throw Error(ErrorKind::AngleAmbiguity, "start term at the cut locus");
    g -= 2.0 * lr.value.matrix();
  }
  if (reduced_) {
    const Mat r = y.matrix().topLeftCorner(n, n);
    g.topLeftCorner(n, n) += 2.0 * (cross_.transpose() * r - r.transpose() * cross_);
  } else {
    Mat acc = Mat::Zero(m, m);
    for (std::size_t k = 0; k < q1_.size(); ++k) {
      const Mat q2c = y.matrix().transpose() * q2_[k].matrix() * y.matrix();
      acc += q1_[k].matrix() * q2c.transpose() - q2c.transpose() * q1_[k].matrix();
    }
    g += 2.0 * acc / static_cast<double>(q1_.size());
  }
  return proj_k_of(g);
}

double f_value(const SrvPair& p1, const SrvPair& p2, const Rotation& y) {
  if (!in_k(y)) throw Error(ErrorKind::YNotInK, "f_value: y is not in K");
  std::vector<Skew> q2y;
  q2y.reserve(p2.q.size());
  for (const Skew& q : p2.q) q2y.push_back(conjugate(y, q));
  return squared_geodesic_distance(p1.start, p2.start * y) + l2_squared_distance(p1.q, q2y);
}

namespace {
Mat cross_integral(const SrvPair& p1, const SrvPair& p2) {
  if (p1.segments() != p2.segments()) throw Error(ErrorKind::GridMismatch, "gradient: grids differ");
  const int m = p1.dim();
  Mat acc = Mat::Zero(m, m);
  for (std::size_t k = 0; k < p1.q.size(); ++k) {
    const Mat& a = p1.q[k].matrix();
    const Mat& b = p2.q[k].matrix();
    acc += a * b.transpose() - b.transpose() * a;
  }
  return acc / static_cast<double>(p1.q.size());
}
}  // namespace

Skew f_gradient(const SrvPair& p1, const SrvPair& p2) {
  const LogResult lr = group_log_flagged(p2.start.inverse() * p1.start);
  if (lr.ambiguous) throw Error(ErrorKind::AngleAmbiguity, "α2(0)⁻¹α1(0) is at the cut locus");
  return proj_k_of(2.0 * (-lr.value.matrix() + cross_integral(p1, p2)));
}

Skew f_gradient_q_only(const SrvPair& p1, const SrvPair& p2) {
  return proj_k_of(2.0 * cross_integral(p1, p2));
}

KResult minimize_over_K(const KObjective& objective, const OptimizerConfig& cfg,
                        const std::optional<Rotation>& warm) {
  cfg.validate();
  KSolver solver = cfg.solver;
  if (solver == KSolver::Auto) {
    solver = objective.dim() == 3 && objective.reduced() ? KSolver::Sampled : KSolver::Gradient;
  }
  if (solver == KSolver::Sampled) return minimize_sampled(objective, warm);

  const int m = objective.dim();
  const int n = m - 1;
  std::mt19937_64 rng(cfg.seed);
  std::vector<Rotation> starts;
  if (warm) starts.push_back(*warm);
  for (int s = 0; s < cfg.multistarts; ++s) {
    if (n == 1) {
      starts.push_back(Rotation::identity(m));
      break;
    }
    if (n == 2) {
      starts.push_back(so2_in_k(2.0 * std::numbers::pi * s / cfg.multistarts));
    } else if (s == 0) {
      starts.push_back(Rotation::identity(m));
    } else {
      Mat block = random_rotation(n, rng).matrix();
      Mat full = Mat::Identity(m, m);
      full.topLeftCorner(n, n) = block;
      starts.push_back(Rotation::trusted(std::move(full)));
    }
  }

  std::optional<KResult> best;
  bool any_converged = false;
  int total_iters = 0;
  for (const Rotation& y0 : starts) {
    Descent d = descend(objective, y0, cfg, rng);
    any_converged = any_converged || d.converged;
    total_iters += d.iterations;
    if (!best || d.f < best->f) best = KResult{d.y, d.f, d.converged, d.iterations};
  }
  best->converged = any_converged;
  best->iterations = total_iters;
  return *best;
}

KResult minimize_over_K(const SrvPair& p1, const SrvPair& p2, const OptimizerConfig& cfg) {
  return minimize_over_K(KObjective(p1, p2, true), cfg);
}

KResult grid_search_so2(const KObjective& objective, int samples) {
  double best_f = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / samples;
    const double f = objective.value(so2_in_k(theta));
    if (f < best_f) {
      best_f = f;
      best_theta = theta;
    }
  }
  return {so2_in_k(best_theta), best_f, true, samples};
}

double distance_M(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg) {
  const SrvPair p1 = srv_of(b1);
  const SrvPair p2 = srv_of(b2);
  const KResult r = minimize_over_K(KObjective(p1, p2, true), cfg);
  return std::sqrt(std::max(std::min(r.f, f_value(p1, p2, r.y)), 0.0));
}

std::vector<SrvPair> geodesic_pairs(const SrvPair& p1, const SrvPair& p2_aligned, int steps) {
  if (steps < 2) throw Error(ErrorKind::InvalidArgument, "geodesic needs at least two frames");
  if (p1.segments() != p2_aligned.segments()) throw Error(ErrorKind::GridMismatch, "geodesic: grids differ");
  const Skew shoot = group_log(p1.start.inverse() * p2_aligned.start);
  const bool horizontal = p1.horizontal && p2_aligned.horizontal;
  std::vector<SrvPair> frames;
  frames.reserve(steps);
  for (int j = 0; j < steps; ++j) {
    if (j == 0) {
      frames.push_back(p1);
      continue;
    }
    if (j == steps - 1) {
      frames.push_back(p2_aligned);
      continue;
    }
    const double s = static_cast<double>(j) / (steps - 1);
    SrvPair f{p1.start * group_exp(shoot * s), {}, horizontal};
    f.q.reserve(p1.q.size());
    for (std::size_t k = 0; k < p1.q.size(); ++k) f.q.push_back((1.0 - s) * p1.q[k] + s * p2_aligned.q[k]);
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<SphereCurve> geodesic_M(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg,
                                    int steps) {
  const SrvPair p1 = srv_of(b1);
  const SrvPair p2 = srv_of(b2);
  const KResult r = minimize_over_K(KObjective(p1, p2, true), cfg);
  std::vector<SphereCurve> out;
  for (const SrvPair& f : geodesic_pairs(p1, k_action(p2, r.y), steps)) out.push_back(curve_of(f));
  return out;
}

double horizontality_ratio(const GroupCurve& alpha) {
  double worst = 0.0;
  for (int k = 0; k < alpha.segments(); ++k) {
    const Skew xi = group_log(alpha.samples[k].inverse() * alpha.samples[k + 1]);
    const double perp = proj_kperp(xi).norm();
    if (perp == 0.0) continue;
    worst = std::max(worst, proj_k(xi).norm() / perp);
  }
  return worst;
}

}  // namespace homocurve
