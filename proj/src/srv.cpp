#include "homocurve/srv.hpp"

#include <cmath>

namespace homocurve {
namespace {

constexpr double kZeroSpeed = 1e-12;
constexpr int kReorthonormalizeEvery = 100;

void check_grid(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorKind::GridMismatch, std::string(what) + ": grids differ");
}

// Left-trivialized velocity on interval k.
Skew interval_velocity(const GroupCurve& alpha, int k) {
  const int t = alpha.segments();
  const LogResult lr = group_log_flagged(alpha.samples[k].inverse() * alpha.samples[k + 1]);
  if (lr.ambiguous) {
    throw Error(ErrorKind::ConsecutiveSamplesAtCutLocus,
                "samples " + std::to_string(k) + " and " + std::to_string(k + 1) +
                    " are a half-turn apart; the curve is under-resolved");
  }
  return lr.value * static_cast<double>(t);
}

}  // namespace

SrvPair q_map(const GroupCurve& alpha) {
  const int t = alpha.segments();
  if (t < 1) throw Error(ErrorKind::InvalidArgument, "q_map needs at least two samples");
  SrvPair out{alpha.samples.front(), {}, false};
  out.q.reserve(t);
  for (int k = 0; k < t; ++k) {
    Skew v = interval_velocity(alpha, k);
    const double speed = v.norm();
    if (speed < kZeroSpeed) {
      out.q.push_back(Skew::zero(alpha.dim()));
    } else {
      out.q.push_back(v * (1.0 / std::sqrt(speed)));
    }
  }
  return out;
}

GroupCurve q_inverse(const SrvPair& pair) {
  const int t = pair.segments();
  GroupCurve out;
  out.samples.reserve(t + 1);
  out.samples.push_back(pair.start);
  const double h = 1.0 / t;
  for (int k = 0; k < t; ++k) {
    const Skew& q = pair.q[k];
    Rotation next = out.samples.back() * group_exp(q * (h * q.norm()));
    if ((k + 1) % kReorthonormalizeEvery == 0) next = nearest_rotation(next.matrix());
    out.samples.push_back(std::move(next));
  }
  return out;
}

double l2_inner(std::span<const Skew> q1, std::span<const Skew> q2) {
  check_grid(q1.size(), q2.size(), "l2_inner");
  double acc = 0.0;
  for (std::size_t k = 0; k < q1.size(); ++k) acc += inner(q1[k], q2[k]);
  return acc / static_cast<double>(q1.size());
}

double l2_norm(std::span<const Skew> q) {
  double acc = 0.0;
  for (const Skew& x : q) acc += x.squared_norm();
  return std::sqrt(acc / static_cast<double>(q.size()));
}

double l2_squared_distance(std::span<const Skew> q1, std::span<const Skew> q2) {
  check_grid(q1.size(), q2.size(), "l2_distance");
  double acc = 0.0;
  for (std::size_t k = 0; k < q1.size(); ++k) {
    acc += (q1[k].matrix() - q2[k].matrix()).squaredNorm();
  }
  return acc / static_cast<double>(q1.size());
}

double l2_distance(std::span<const Skew> q1, std::span<const Skew> q2) {
  return std::sqrt(l2_squared_distance(q1, q2));
}

double pair_distance(const SrvPair& p1, const SrvPair& p2) {
  return std::sqrt(squared_geodesic_distance(p1.start, p2.start) + l2_squared_distance(p1.q, p2.q));
}

double curve_distance_G(const GroupCurve& a1, const GroupCurve& a2) {
  check_grid(a1.samples.size(), a2.samples.size(), "curve_distance_G");
  return pair_distance(q_map(a1), q_map(a2));
}

SrvPair act_group(const Rotation& g, const SrvPair& pair) {
  return SrvPair{g * pair.start, pair.q, pair.horizontal};
}

SrvPair act_reparam(const SrvPair& pair, const Reparametrization& gamma) {
  const int t = pair.segments();
  const double h = 1.0 / t;
  SrvPair out{pair.start, {}, pair.horizontal};
  out.q.reserve(t);
  for (int k = 0; k < t; ++k) {
    const double a = k * h;
    const double b = k + 1 == t ? 1.0 : (k + 1) * h;
    const double slope = gamma.secant_slope(a, b);
    if (!(slope > 0.0)) throw Error(ErrorKind::NonMonotone, "reparametrization is not increasing");
    const double u = gamma(0.5 * (a + b));
    const int idx = std::min(t - 1, static_cast<int>(std::floor(u * t)));
    out.q.push_back(pair.q[std::max(0, idx)] * std::sqrt(slope));
  }
  return out;
}

double pullback_metric(const GroupCurve& alpha, const CurveVariation& u, const CurveVariation& v) {
  const int t = alpha.segments();
  check_grid(u.xi.size(), alpha.samples.size(), "pullback_metric");
  check_grid(v.xi.size(), alpha.samples.size(), "pullback_metric");
  const double h = 1.0 / t;

  double total = inner(u.xi.front(), v.xi.front());
  for (int k = 0; k < t; ++k) {
    const Skew vel = interval_velocity(alpha, k);
    const double speed = vel.norm();
    if (speed < kZeroSpeed) {
      throw Error(ErrorKind::DegenerateSpeed, "zero speed on interval " + std::to_string(k));
    }
    auto ds = [&](const CurveVariation& w) {
      const Mat mid = 0.5 * (w.xi[k].matrix() + w.xi[k + 1].matrix());
      const Mat deriv = (w.xi[k + 1].matrix() - w.xi[k].matrix()) * static_cast<double>(t);
      const Mat bracket = vel.matrix() * mid - mid * vel.matrix();
      return Skew::trusted((deriv + bracket) / speed);
    };
    const Skew du = ds(u);
    const Skew dv = ds(v);
    const Skew unit = vel * (1.0 / speed);
    const double du_t = inner(du, unit);
    const double dv_t = inner(dv, unit);
    const Skew du_n = du - du_t * unit;
    const Skew dv_n = dv - dv_t * unit;
    const double integrand = inner(du_n, dv_n) + 0.25 * du_t * dv_t;
    total += integrand * speed * h;
  }
  return total;
}

GroupCurve perturb(const GroupCurve& alpha, const CurveVariation& u, double eps) {
  check_grid(u.xi.size(), alpha.samples.size(), "perturb");
  GroupCurve out;
  out.samples.reserve(alpha.samples.size());
  for (std::size_t i = 0; i < alpha.samples.size(); ++i) {
    out.samples.push_back(alpha.samples[i] * group_exp(u.xi[i] * eps));
  }
  return out;
}

double discrete_length(const GroupCurve& alpha) {
  double len = 0.0;
  for (int k = 0; k < alpha.segments(); ++k) {
    len += geodesic_distance(alpha.samples[k], alpha.samples[k + 1]);
  }
  return len;
}

}  // namespace homocurve
