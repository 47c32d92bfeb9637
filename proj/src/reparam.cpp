#include "homocurve/reparam.hpp"

#include <algorithm>
#include <cmath>

#include "homocurve/errors.hpp"

namespace homocurve {
namespace {

double interpolate(const std::vector<Reparametrization::Knot>& knots, double x, bool forward) {
  x = std::clamp(x, 0.0, 1.0);
  auto key = [forward](const Reparametrization::Knot& k) { return forward ? k.first : k.second; };
  auto val = [forward](const Reparametrization::Knot& k) { return forward ? k.second : k.first; };
  auto it = std::lower_bound(knots.begin(), knots.end(), x,
                             [&](const Reparametrization::Knot& k, double v) { return key(k) < v; });
  if (it == knots.begin()) return val(*it);
  if (it == knots.end()) return val(knots.back());
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (key(hi) == x) return val(hi);
  const double w = (x - key(lo)) / (key(hi) - key(lo));
  return val(lo) + w * (val(hi) - val(lo));
}

}  // namespace

Reparametrization::Reparametrization() : knots_{{0.0, 0.0}, {1.0, 1.0}} {}

Reparametrization::Reparametrization(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw Error(ErrorKind::NonMonotone, "need at least two knots");
  if (knots_.front() != Knot{0.0, 0.0} || knots_.back() != Knot{1.0, 1.0}) {
    throw Error(ErrorKind::NonMonotone, "knots must start at (0,0) and end at (1,1)");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].first > knots_[i - 1].first) || !(knots_[i].second > knots_[i - 1].second)) {
      throw Error(ErrorKind::NonMonotone, "knots must be strictly increasing in both coordinates");
    }
  }
}

Reparametrization Reparametrization::from_grid_path(const std::vector<std::pair<int, int>>& nodes,
                                                    int segments) {
  std::vector<Knot> knots;
  knots.reserve(nodes.size());
  const double h = 1.0 / segments;
  for (auto [i, j] : nodes) {
    // Exact endpoints regardless of rounding in i*h.
    const double t = i == segments ? 1.0 : i * h;
    const double u = j == segments ? 1.0 : j * h;
    knots.emplace_back(t, u);
  }
  return Reparametrization(std::move(knots));
}

double Reparametrization::operator()(double t) const { return interpolate(knots_, t, true); }

double Reparametrization::inverse_at(double u) const { return interpolate(knots_, u, false); }

Reparametrization Reparametrization::inverse() const {
  std::vector<Knot> flipped;
  flipped.reserve(knots_.size());
  for (auto [t, u] : knots_) flipped.emplace_back(u, t);
  return Reparametrization(std::move(flipped));
}

Reparametrization Reparametrization::compose(const Reparametrization& inner) const {
  // Breakpoints of the composition: inner's knots and preimages of ours.
  std::vector<double> ts;
  for (auto [t, u] : inner.knots_) ts.push_back(t);
  for (auto [t, u] : knots_) ts.push_back(inner.inverse_at(t));
  std::sort(ts.begin(), ts.end());
  std::vector<Knot> out;
  for (double t : ts) {
    const double u = (*this)(inner(t));
    if (!out.empty() && (t <= out.back().first || u <= out.back().second)) continue;
    out.emplace_back(t, u);
  }
  out.front() = {0.0, 0.0};
  if (out.back().first != 1.0) {
    if (out.back().first > 1.0 - 1e-15 || out.back().second > 1.0 - 1e-15) out.pop_back();
    out.emplace_back(1.0, 1.0);
  }
  return Reparametrization(std::move(out));
}

double Reparametrization::secant_slope(double a, double b) const {
  return ((*this)(b) - (*this)(a)) / (b - a);
}

double Reparametrization::slope_at(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const Knot& k) { return v < k.first; });
  if (it == knots_.begin()) ++it;
  if (it == knots_.end()) --it;
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  return (hi.second - lo.second) / (hi.first - lo.first);
}

bool Reparametrization::is_identity(double tol) const {
  for (auto [t, u] : knots_) {
    if (std::abs(t - u) > tol) return false;
  }
  return true;
}

double sup_distance(const Reparametrization& a, const Reparametrization& b) {
  double worst = 0.0;
  for (auto [t, u] : a.knots()) worst = std::max(worst, std::abs(u - b(t)));
  for (auto [t, u] : b.knots()) worst = std::max(worst, std::abs(u - a(t)));
  return worst;
}

}  // namespace homocurve
