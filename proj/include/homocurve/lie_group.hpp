#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "homocurve/errors.hpp"

namespace homocurve {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Element of SO(m). Constructing from a raw matrix validates
/// AᵗA = I and det A = 1 to 1e-10.
class Rotation {
 public:
  explicit Rotation(Mat m);

  static Rotation identity(int dim);
  /// Skips validation. Use for products of rotations and other results
  /// that are orthogonal by construction.
  static Rotation trusted(Mat m);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

  Rotation inverse() const { return trusted(m_.transpose()); }
  Rotation operator*(const Rotation& other) const { return trusted(m_ * other.m_); }
  Vec operator*(const Vec& v) const { return m_ * v; }

  bool is_valid(double tol = 1e-10) const;

 private:
  struct TrustedTag {};
  Rotation(Mat m, TrustedTag) : m_(std::move(m)) {}
  Mat m_;
};

/// Element of so(m). Stored antisymmetrized, so X + Xᵗ = 0 holds exactly.
class Skew {
 public:
  Skew() = default;
  explicit Skew(const Mat& x);

  static Skew zero(int dim);
  /// E_ij = e_i e_jᵗ - e_j e_iᵗ (0-based indices, i != j).
  static Skew basis(int dim, int i, int j);
  static Skew trusted(Mat x);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Norm induced by the trace inner product.
  double norm() const { return m_.norm(); }
  double squared_norm() const { return m_.squaredNorm(); }

  Skew& operator+=(const Skew& o);
  Skew& operator-=(const Skew& o);
  Skew& operator*=(double s);

  friend Skew operator+(Skew a, const Skew& b) { return a += b; }
  friend Skew operator-(Skew a, const Skew& b) { return a -= b; }
  friend Skew operator*(double s, Skew a) { return a *= s; }
  friend Skew operator*(Skew a, double s) { return a *= s; }
  friend Skew operator-(Skew a) { return a *= -1.0; }

 private:
  Mat m_;
};

/// ⟨x, y⟩ = tr(xᵗy).
double inner(const Skew& x, const Skew& y);

Rotation group_exp(const Skew& v);

struct LogResult {
  Skew value;
  /// Set when some rotation angle lies within 1e-9 of π; the plane
  /// orientation is then a consistent but arbitrary choice.
  bool ambiguous = false;
};

/// Principal logarithm (minimal-norm preimage under group_exp).
LogResult group_log_flagged(const Rotation& a);
inline Skew group_log(const Rotation& a) { return group_log_flagged(a).value; }

/// Geodesic distance of the trace metric, ‖log(aᵗb)‖.
double geodesic_distance(const Rotation& a, const Rotation& b);
double squared_geodesic_distance(const Rotation& a, const Rotation& b);

/// Orthogonal split so(n+1) = k ⊕ k⊥ for the subgroup SO(n) embedded as
/// the upper-left block. k = span{E_ij : i,j < n}, k⊥ = span{E_i,n}.
struct SubalgebraBasis {
  int dim = 0;  // n + 1
  std::vector<Skew> k_basis;
  std::vector<Skew> kperp_basis;

  static SubalgebraBasis standard(int dim);
};

Skew proj_k(const Skew& x, const SubalgebraBasis& basis);
Skew proj_kperp(const Skew& x, const SubalgebraBasis& basis);

// Block forms of the same projections for the standard basis.
Skew proj_k(const Skew& x);
Skew proj_kperp(const Skew& x);
/// Skew part of an arbitrary square matrix projected onto k.
Skew proj_k_of(const Mat& m);

/// True when y = diag(A, 1) with A in SO(n), within tol.
bool in_k(const Rotation& y, double tol = 1e-9);

/// y⁻¹ x y. Throws YNotInK unless y lies in the embedded SO(n).
Skew conjugate(const Rotation& y, const Skew& x);
/// y⁻¹ x y with no structural check on y.
Skew conjugate_any(const Rotation& y, const Skew& x);

/// Coordinates u ∈ ℝⁿ of a k⊥ element x = u e_nᵗ - e_n uᵗ.
Vec kperp_coords(const Skew& x);
Skew from_kperp_coords(const Vec& u);

/// diag(block, 1).
Rotation embed_in_k(const Mat& block);
/// Rotation by theta in the (e_0, e_1) plane, embedded in K (n = 2 only).
Rotation so2_in_k(double theta);

/// Shortest rotation taking unit vector p to unit vector q:
///   R = (I - 2/|p+q|² (p+q)(p+q)ᵗ)(I - 2ppᵗ).
/// Throws AntipodalPoints when 1 + p·q <= 1e-12.
Rotation efficient_rotation(const Vec& p, const Vec& q);

/// Closest rotation in Frobenius norm (polar factor with det fixed to +1).
Rotation nearest_rotation(const Mat& m);

/// Haar-distributed rotation of the given dimension.
Rotation random_rotation(int dim, std::mt19937_64& rng);

/// Fréchet mean on G under the trace metric, by fixed-point iteration
/// a ← a·exp(mean_i log(a⁻¹ x_i)) started at `init`.
Rotation frechet_mean(const std::vector<Rotation>& points, const Rotation& init,
                      int max_iters = 100, double tol = 1e-13);

}  // namespace homocurve
