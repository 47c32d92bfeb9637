#pragma once

// Random fixtures and independent reference implementations shared by the
// unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "homocurve/alignment.hpp"
#include "homocurve/statistics.hpp"

namespace homocurve::testing {

inline Skew random_skew(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Mat v = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      v(i, j) = normal(rng);
      v(j, i) = -v(i, j);
    }
  }
  return Skew(v);
}

inline Skew random_k_direction(int dim, std::mt19937_64& rng) {
  Skew v = proj_k(random_skew(dim, rng));
  return v * (1.0 / v.norm());
}

inline Vec random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  return v.normalized();
}

/// Uniformly random element of the embedded SO(n).
inline Rotation random_k(int dim, std::mt19937_64& rng) {
  return embed_in_k(random_rotation(dim - 1, rng).matrix());
}

/// α_{i+1} = α_i exp(ξ_i / T) with random ξ_i of norm about `speed`.
inline GroupCurve random_group_curve(int dim, int segments, std::mt19937_64& rng, double speed = 2.0) {
  GroupCurve a{{random_rotation(dim, rng)}};
  for (int i = 0; i < segments; ++i) {
    Skew xi = random_skew(dim, rng);
    xi *= speed / (xi.norm() * segments);
    a.samples.push_back(a.samples.back() * group_exp(xi));
  }
  return a;
}

/// Smooth random curve on Sⁿ: a normalized low-frequency perturbation of a
/// random base point. `arc` scales the size of the perturbation.
struct SmoothCurveModel {
  Vec base;
  std::vector<Vec> cos_terms;
  std::vector<Vec> sin_terms;

  Vec operator()(double t) const {
    Vec p = base;
    for (std::size_t k = 0; k < cos_terms.size(); ++k) {
      const double w = std::numbers::pi * static_cast<double>(k + 1) * t;
      p += cos_terms[k] * std::cos(w) + sin_terms[k] * std::sin(w);
    }
    return p.normalized();
  }
};

inline SmoothCurveModel random_smooth_model(int ambient, std::mt19937_64& rng, double arc = 0.8, int modes = 3) {
  SmoothCurveModel m{random_unit(ambient, rng), {}, {}};
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // Total perturbation norm stays below 1, so the curve never meets the origin.
  const double per = arc / (2.0 * modes * std::sqrt(static_cast<double>(ambient)));
  for (int k = 0; k < modes; ++k) {
    Vec c(ambient);
    Vec s(ambient);
    for (int i = 0; i < ambient; ++i) {
      c(i) = per * unit(rng);
      s(i) = per * unit(rng);
    }
    m.cos_terms.push_back(c / (k + 1));
    m.sin_terms.push_back(s / (k + 1));
  }
  return m;
}

template <class F>
SphereCurve sample_curve(const F& f, int segments) {
  const Vec first = f(0.0);
  Mat pts(segments + 1, first.size());
  for (int i = 0; i <= segments; ++i) pts.row(i) = f(static_cast<double>(i) / segments).transpose();
  return SphereCurve(std::move(pts));
}

inline SphereCurve random_smooth_curve(int ambient, int segments, std::mt19937_64& rng, double arc = 0.8) {
  return sample_curve(random_smooth_model(ambient, rng, arc), segments);
}

/// Random PL homeomorphism with knots on the grid i/T and slopes in [1/2, 2].
inline Reparametrization random_grid_reparam(int segments, std::mt19937_64& rng) {
  // Compose a path out of steps (1,1), (1,2), (2,1) that ends at (T,T).
  std::uniform_int_distribution<int> pick(0, 2);
  for (;;) {
    std::vector<std::pair<int, int>> nodes{{0, 0}};
    int i = 0;
    int j = 0;
    while (i < segments && j < segments) {
      const int c = pick(rng);
      const int di = c == 1 ? 2 : 1;
      const int dj = c == 2 ? 2 : 1;
      if (i + di > segments || j + dj > segments) continue;
      i += di;
      j += dj;
      nodes.emplace_back(i, j);
    }
    if (i == segments && j == segments) return Reparametrization::from_grid_path(nodes, segments);
  }
}

/// Smooth diffeomorphism γ(t) = (e^{at} - 1)/(e^a - 1), sampled as PL on a fine grid.
inline Reparametrization smooth_reparam(double amplitude, int knots = 400) {
  std::vector<Reparametrization::Knot> k;
  for (int i = 0; i <= knots; ++i) {
    const double t = static_cast<double>(i) / knots;
    const double u = i == knots ? 1.0 : std::expm1(amplitude * t) / std::expm1(amplitude);
    k.emplace_back(t, u);
  }
  return Reparametrization(std::move(k));
}

// ---- Independent reference implementations ----

/// Matrix exponential by a plain Taylor series with scaling and squaring.
inline Mat taylor_exp(const Mat& x) {
  int squarings = 0;
  double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const Mat y = x / std::ldexp(1.0, squarings);
  Mat term = Mat::Identity(x.rows(), x.cols());
  Mat sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * y / k;
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// SO(3) logarithm through the unit quaternion (Shepperd's method).
inline Mat quaternion_log(const Mat& r) {
  const double tr = r.trace();
  double w;
  double x;
  double y;
  double z;
  if (tr > r(0, 0) && tr > r(1, 1) && tr > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  if (w < 0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  const double vn = std::sqrt(x * x + y * y + z * z);
  const double angle = 2.0 * std::atan2(vn, w);
  Mat out = Mat::Zero(3, 3);
  if (vn == 0.0) return out;
  const double f = angle / vn;
  out << 0, -z * f, y * f, z * f, 0, -x * f, -y * f, x * f, 0;
  return out;
}

/// ∫‖q1 - (q2∘γ)√γ'‖² for a PL γ and piecewise-constant q's, by splitting
/// every linear piece of γ at the preimages of the q2 grid and at the q1 grid.
inline double brute_reparam_energy(const std::vector<Skew>& q1, const std::vector<Skew>& q2,
                                   const Reparametrization& gamma) {
  const int t = static_cast<int>(q1.size());
  double total = 0.0;
  const auto& k = gamma.knots();
  for (std::size_t p = 0; p + 1 < k.size(); ++p) {
    const auto [t0, u0] = k[p];
    const auto [t1, u1] = k[p + 1];
    const double slope = (u1 - u0) / (t1 - t0);
    std::vector<double> cuts{t0, t1};
    for (int a = 1; a < t; ++a) {
      const double ta = static_cast<double>(a) / t;
      if (ta > t0 && ta < t1) cuts.push_back(ta);
      const double ua = static_cast<double>(a) / t;
      if (ua > u0 && ua < u1) cuts.push_back(t0 + (ua - u0) / slope);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double len = cuts[c + 1] - cuts[c];
      if (len <= 0) continue;
      const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
      const double umid = u0 + slope * (mid - t0);
      const int ia = std::min(t - 1, static_cast<int>(mid * t));
      const int ib = std::min(t - 1, static_cast<int>(umid * t));
      total += (q1[ia].matrix() - std::sqrt(slope) * q2[ib].matrix()).squaredNorm() * len;
    }
  }
  return total;
}

/// Minimum of brute_reparam_energy over every grid path with steps
/// (k, l), 1 <= k, l <= window, by exhaustive enumeration.
inline double enumerate_paths(const std::vector<Skew>& q1, const std::vector<Skew>& q2, int window,
                              long* count = nullptr) {
  const int t = static_cast<int>(q1.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> path{{0, 0}};
  auto rec = [&](auto& self, int i, int j) -> void {
    if (i == t && j == t) {
      if (count) ++*count;
      best = std::min(best, brute_reparam_energy(q1, q2, Reparametrization::from_grid_path(path, t)));
      return;
    }
    for (int k = 1; k <= window && i + k <= t; ++k) {
      for (int l = 1; l <= window && j + l <= t; ++l) {
        path.emplace_back(i + k, j + l);
        self(self, i + k, j + l);
        path.pop_back();
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

/// F over K for n = 2 on an equally spaced angle grid, using the literal
/// formula through f_value.
inline double grid_oracle_so2(const SrvPair& p1, const SrvPair& p2, int samples, bool with_start = true) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Rotation y = so2_in_k(2.0 * std::numbers::pi * i / samples);
    double f = f_value(p1, p2, y);
    if (!with_start) f -= squared_geodesic_distance(p1.start, p2.start * y);
    best = std::min(best, f);
  }
  return best;
}

/// Random piecewise-constant q with values in k⊥.
inline std::vector<Skew> random_kperp_q(int dim, int segments, std::mt19937_64& rng, double scale = 1.0) {
  std::vector<Skew> q;
  q.reserve(segments);
  for (int k = 0; k < segments; ++k) q.push_back(proj_kperp(random_skew(dim, rng, scale)));
  return q;
}

/// Makes q1 constant across the cells that one cell of γ0's domain maps
/// onto, so that (q1∘γ0)√γ0' is again piecewise constant on the grid.
inline void tie_cells(std::vector<Skew>& q1, const Reparametrization& gamma0) {
  const int t = static_cast<int>(q1.size());
  for (int b = 0; b < t; ++b) {
    const int lo = static_cast<int>(std::lround(gamma0(static_cast<double>(b) / t) * t));
    const int hi = static_cast<int>(std::lround(gamma0(static_cast<double>(b + 1) / t) * t));
    for (int a = lo + 1; a < hi; ++a) q1[a] = q1[lo];
  }
}

/// (q1∘γ0)√γ0' on the grid; exact when q1 was prepared with tie_cells and
/// γ0 has grid knots.
inline std::vector<Skew> planted_q(const std::vector<Skew>& q1, const Reparametrization& gamma0) {
  const int t = static_cast<int>(q1.size());
  std::vector<Skew> q2;
  q2.reserve(t);
  for (int b = 0; b < t; ++b) {
    const double mid = (b + 0.5) / t;
    const int a = std::min(t - 1, static_cast<int>(gamma0(mid) * t));
    q2.push_back(q1[a] * std::sqrt(gamma0.slope_at(mid)));
  }
  return q2;
}

/// Removes from x its components along the K-orbit through mean, whose
/// tangent directions are (Z, qZ - Zq) for Z in k.
inline TangentVector horizontal_part(const SrvPair& mean, TangentVector x) {
  const SubalgebraBasis basis = SubalgebraBasis::standard(mean.dim());
  std::vector<TangentVector> orbit;
  for (const Skew& z : basis.k_basis) {
    TangentVector w{z, {}};
    for (const Skew& q : mean.q) w.dq.push_back(Skew(q.matrix() * z.matrix() - z.matrix() * q.matrix()));
    for (const TangentVector& u : orbit) {
      const double c = tangent_inner(w, u) / tangent_inner(u, u);
      w.at_start -= c * u.at_start;
      for (std::size_t k = 0; k < w.dq.size(); ++k) w.dq[k] -= c * u.dq[k];
    }
    orbit.push_back(std::move(w));
  }
  for (const TangentVector& u : orbit) {
    const double c = tangent_inner(x, u) / tangent_inner(u, u);
    x.at_start -= c * u.at_start;
    for (std::size_t k = 0; k < x.dq.size(); ++k) x.dq[k] -= c * u.dq[k];
  }
  return x;
}

}  // namespace homocurve::testing
