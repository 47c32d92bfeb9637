#pragma once

#include <span>
#include <vector>

#include "homocurve/lie_group.hpp"
#include "homocurve/reparam.hpp"

namespace homocurve {

/// Curve in G sampled at t_i = i/T, i = 0..T.
struct GroupCurve {
  std::vector<Rotation> samples;

  int segments() const { return static_cast<int>(samples.size()) - 1; }
  int dim() const { return samples.front().dim(); }
};

/// Square-root-velocity representation (α(0), q). q[k] is the constant
/// value on [k/T, (k+1)/T).
struct SrvPair {
  Rotation start;
  std::vector<Skew> q;
  /// q takes values in k⊥.
  bool horizontal = false;

  int segments() const { return static_cast<int>(q.size()); }
  int dim() const { return start.dim(); }
};

/// Tangent vector in the transformed coordinates: a variation of the
/// start point (left-trivialized) and a variation of q.
struct TangentVector {
  Skew at_start;
  std::vector<Skew> dq;
};

/// Left-trivialized variation field along a GroupCurve: u_i = α_i ξ_i.
struct CurveVariation {
  std::vector<Skew> xi;
};

SrvPair q_map(const GroupCurve& alpha);
GroupCurve q_inverse(const SrvPair& pair);

/// L² norm of a piecewise-constant q on a uniform grid.
double l2_norm(std::span<const Skew> q);
double l2_squared_distance(std::span<const Skew> q1, std::span<const Skew> q2);
double l2_distance(std::span<const Skew> q1, std::span<const Skew> q2);
/// ∫⟨q1, q2⟩ dt as a Riemann sum.
double l2_inner(std::span<const Skew> q1, std::span<const Skew> q2);

/// Product distance (d²(α1(0), α2(0)) + ‖q1 - q2‖²)^½.
double pair_distance(const SrvPair& p1, const SrvPair& p2);
double curve_distance_G(const GroupCurve& a1, const GroupCurve& a2);

SrvPair act_group(const Rotation& g, const SrvPair& pair);
/// (q∘γ)√γ' with q looked up at interval midpoints and the slope taken as
/// the secant over each interval.
SrvPair act_reparam(const SrvPair& pair, const Reparametrization& gamma);

/// Pullback of the product metric through the Q-map,
///   ⟨u(0), v(0)⟩ + ∫ ⟨D_s uᴺ, D_s vᴺ⟩ + ¼⟨D_s uᵀ, D_s vᵀ⟩ ds,
/// with D_s u = (ξ' + [α⁻¹α', ξ]) / ‖α'‖ by central differences at
/// interval midpoints. Throws DegenerateSpeed on a zero-speed interval.
double pullback_metric(const GroupCurve& alpha, const CurveVariation& u, const CurveVariation& v);

/// Curve perturbed along a variation: α_i exp(ε ξ_i).
GroupCurve perturb(const GroupCurve& alpha, const CurveVariation& u, double eps);

/// Σ‖α_i⁻¹α_{i+1}‖-based discrete length of a curve in G.
double discrete_length(const GroupCurve& alpha);

}  // namespace homocurve
