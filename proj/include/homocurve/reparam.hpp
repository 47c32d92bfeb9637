#pragma once

#include <utility>
#include <vector>

namespace homocurve {

/// Orientation-preserving piecewise-linear homeomorphism of [0, 1].
/// Knots are strictly increasing in both coordinates and start/end at
/// (0, 0) and (1, 1) exactly.
class Reparametrization {
 public:
  using Knot = std::pair<double, double>;

  Reparametrization();
  /// Throws NonMonotone on violated knot invariants.
  explicit Reparametrization(std::vector<Knot> knots);

  static Reparametrization identity() { return {}; }
  /// Path through grid nodes (i, j), i.e. knots (i/T, j/T).
  static Reparametrization from_grid_path(const std::vector<std::pair<int, int>>& nodes, int segments);

  double operator()(double t) const;
  double inverse_at(double u) const;
  Reparametrization inverse() const;
  /// (*this) ∘ inner.
  Reparametrization compose(const Reparametrization& inner) const;

  /// (γ(b) - γ(a)) / (b - a).
  double secant_slope(double a, double b) const;
  /// Slope of the linear piece containing t (the right piece at a knot).
  double slope_at(double t) const;

  const std::vector<Knot>& knots() const { return knots_; }

  bool is_identity(double tol = 0.0) const;

 private:
  std::vector<Knot> knots_;
};

/// sup_t |a(t) - b(t)|, exact for piecewise-linear maps.
double sup_distance(const Reparametrization& a, const Reparametrization& b);

}  // namespace homocurve
