#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "homocurve/srv.hpp"

namespace homocurve {

/// Curve on Sⁿ ⊂ ℝⁿ⁺¹, one unit vector per row, sampled at t_i = i/T.
class SphereCurve {
 public:
  /// Validates unit norm (1e-10) and that no two adjacent samples are
  /// antipodal (1 + β_i·β_{i+1} > 1e-12).
  explicit SphereCurve(Mat points);

  int segments() const { return static_cast<int>(points_.rows()) - 1; }
  int ambient_dim() const { return static_cast<int>(points_.cols()); }
  Vec point(int i) const { return points_.row(i).transpose(); }
  const Mat& points() const { return points_; }

 private:
  Mat points_;
};

/// North pole (0, ..., 0, 1).
Vec north_pole(int ambient_dim);

/// Point at fraction s along the shorter great-circle arc from a to b.
Vec slerp(const Vec& a, const Vec& b, double s);
/// Great-circle angle between unit vectors.
double sphere_angle(const Vec& a, const Vec& b);

/// g·β, applied pointwise.
SphereCurve rotate_curve(const Rotation& g, const SphereCurve& beta);

SphereCurve project_pi(const GroupCurve& alpha);
/// Rotation α0 with α0·n = b0: R_{n,b0}, or diag(-1, I, -1) at b0 = -n.
Rotation lift_initial(const Vec& b0);
/// α_0 = lift_initial(β_0), α_{i+1} = R_{β_i,β_{i+1}} α_i.
GroupCurve horizontal_lift(const SphereCurve& beta);
/// Same recursion from a caller-chosen initial lift (start·n must equal β_0).
GroupCurve horizontal_lift(const SphereCurve& beta, const Rotation& start);

/// Q-representation of the horizontal lift. Residual k-components below
/// 1e-9 are zeroed and the pair is flagged horizontal.
SrvPair srv_of(const SphereCurve& beta);
SrvPair srv_of(const SphereCurve& beta, const Rotation& start);

/// Sphere curve of an SRV pair: project_pi(q_inverse(pair)).
SphereCurve curve_of(const SrvPair& pair);

/// (α0, q)∗y = (α0 y, y⁻¹ q y). Throws YNotInK.
SrvPair k_action(const SrvPair& pair, const Rotation& y);

enum class KSolver {
  Auto,      ///< Sampled for n = 2 with horizontal data, gradient otherwise.
  Gradient,  ///< Riemannian gradient descent with multistart.
  Sampled,   ///< Dense angle sampling plus golden-section refinement (n = 2).
};

struct OptimizerConfig {
  double step = 0.1;
  double grad_tol = 1e-8;
  int max_iters = 1000;
  int multistarts = 8;
  KSolver solver = KSolver::Auto;
  std::uint64_t seed = 0;
  /// Reparametrization search: predecessor window and alternation schedule.
  int dp_window = 4;
  int max_rounds = 20;
  double round_tol = 1e-8;

  void validate() const;
};

/// F(y) = d²(α1(0), α2(0)y) + ‖q1 - y⁻¹q2y‖², optionally without the first
/// term. q2 may be a grid projection of a reparametrized function, in which
/// case ‖q2‖² is supplied separately since it differs from the norm of the
/// projection.
class KObjective {
 public:
  KObjective(const SrvPair& p1, const SrvPair& p2, bool with_start);
  KObjective(const SrvPair& p1, const SrvPair& p2_projected, double q2_squared_norm, bool with_start);

  double value(const Rotation& y) const;
  /// ∇F at y, left-trivialized: the element G of k with
  /// d/ds F(y exp(sV)) = ⟨G, V⟩ at s = 0.
  Skew gradient(const Rotation& y) const;

  int dim() const { return start1_.dim(); }
  bool reduced() const { return reduced_; }
  bool with_start() const { return with_start_; }

  /// Value of F for n = 2 at y = so2_in_k(theta).
  double value_so2(double theta) const;

 private:
  void prepare();

  Rotation start1_;
  Rotation start2_;
  std::vector<Skew> q1_;
  std::vector<Skew> q2_;
  double q1_sq_ = 0.0;
  double q2_sq_ = 0.0;
  bool with_start_ = true;
  // For horizontal data the cross term reduces to 2 tr(Rᵗ M) with
  // M = ∫ u2 u1ᵗ dt and R the SO(n) block of y.
  bool reduced_ = false;
  Mat cross_;
  Mat start_product_;  // α1(0)ᵗ α2(0)
};

struct KResult {
  Rotation y;
  double f;
  bool converged;
  int iterations;
};

/// F(y) for the full parametrized objective.
double f_value(const SrvPair& p1, const SrvPair& p2, const Rotation& y);
/// ∇_I F = 2 Proj_k(-Log(α2(0)⁻¹α1(0)) + ∫(q1 q2ᵗ - q2ᵗ q1) dt).
/// Throws AngleAmbiguity when α2(0)⁻¹α1(0) is at the cut locus.
Skew f_gradient(const SrvPair& p1, const SrvPair& p2);
/// Gradient of the q-term alone, 2 Proj_k(∫(q1 q2ᵗ - q2ᵗ q1) dt).
Skew f_gradient_q_only(const SrvPair& p1, const SrvPair& p2);

/// Best y ∈ K over all starts. `warm` adds a start point and the result is
/// never worse than F(warm).
KResult minimize_over_K(const KObjective& objective, const OptimizerConfig& cfg,
                        const std::optional<Rotation>& warm = std::nullopt);
KResult minimize_over_K(const SrvPair& p1, const SrvPair& p2, const OptimizerConfig& cfg);

/// Exhaustive evaluation of F over `samples` equally spaced angles (n = 2).
KResult grid_search_so2(const KObjective& objective, int samples);

double distance_M(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg);

/// Geodesic in AC([0,1], M): frames at s = j/(steps-1).
std::vector<SphereCurve> geodesic_M(const SphereCurve& b1, const SphereCurve& b2,
                                    const OptimizerConfig& cfg, int steps);
/// The same geodesic as pairs (α(0)(s), q(s)).
std::vector<SrvPair> geodesic_pairs(const SrvPair& p1, const SrvPair& p2_aligned, int steps);

/// Largest ‖proj_k ξ_i‖ / ‖proj_k⊥ ξ_i‖ over the intervals of a lifted
/// curve, ξ_i = log(α_i⁻¹ α_{i+1}).
double horizontality_ratio(const GroupCurve& alpha);

}  // namespace homocurve
