#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "homocurve/homogeneous.hpp"

namespace homocurve {

/// Which group actions are factored out of the curve distance.
enum class QuotientMode {
  Parametrized,      ///< AC([0,1], M): K only.
  Shape,             ///< modulo reparametrization.
  ModRotation,       ///< modulo rigid motions of M.
  ShapeModRotation,  ///< modulo both.
};

/// CLI spelling: param | shape | rot | shape-rot.
std::string_view mode_name(QuotientMode mode);
QuotientMode parse_mode(std::string_view name);

struct DpResult {
  Reparametrization gamma;
  /// ∫‖q1 - (q2∘γ)√γ'‖² dt for the returned path.
  double cost;
  std::vector<std::pair<int, int>> path;
};

/// Optimal grid path γ from (0,0) to (T,T) with steps (k, l), 1 <= k,l <= window,
/// minimizing ∫‖q1 - (q2∘γ)√γ'‖² with both q piecewise constant on the grid.
DpResult dp_reparametrize(std::span<const Skew> q1, std::span<const Skew> q2, int window = 4);

/// ∫‖q1 - (q2∘γ)√γ'‖² dt, integrated exactly over the common refinement
/// of the grid and the knots of γ.
double reparam_energy(std::span<const Skew> q1, std::span<const Skew> q2, const Reparametrization& gamma);

/// L² projection of (q2∘γ)√γ' onto functions constant on the grid intervals.
std::vector<Skew> reparam_projected(std::span<const Skew> q2, const Reparametrization& gamma);

struct AlignmentResult {
  Rotation y;
  Reparametrization gamma;
  /// Rigid motion taking β2 towards β1 (rotation quotients only).
  std::optional<Rotation> g;
  double cost;
  bool converged = true;
  int rounds = 0;
  /// Squared cost after the initial K-step and after every alternation round.
  std::vector<double> history;
};

AlignmentResult align_pairs(const SrvPair& p1, const SrvPair& p2, QuotientMode mode,
                            const OptimizerConfig& cfg);
AlignmentResult align_curves(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode,
                             const OptimizerConfig& cfg);

AlignmentResult distance_shape(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg);
AlignmentResult distance_mod_rotation(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg);
AlignmentResult distance_mod_both(const SphereCurve& b1, const SphereCurve& b2, const OptimizerConfig& cfg);

double distance(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode, const OptimizerConfig& cfg);

/// Representation of p2 in the frame that realizes the alignment against p1:
/// (g α2(0) y, y⁻¹ P_γ(q2) y), with P_γ the grid projection of (q2,γ).
SrvPair aligned_pair(const SrvPair& p2, const AlignmentResult& r);

/// Squared infimand evaluated at the alignment's (y, γ, g), with the
/// reparametrized term integrated exactly.
double alignment_objective(const SrvPair& p1, const SrvPair& p2, QuotientMode mode, const AlignmentResult& r);

/// β∘γ at the grid points, β read as a piecewise-geodesic polygon.
SphereCurve reparametrize_curve(const SphereCurve& beta, const Reparametrization& gamma);

/// Geodesic frames between b1 and the optimally aligned representative of b2.
std::vector<SphereCurve> geodesic(const SphereCurve& b1, const SphereCurve& b2, QuotientMode mode,
                                  const OptimizerConfig& cfg, int steps);

}  // namespace homocurve
