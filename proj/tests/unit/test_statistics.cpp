#include <gtest/gtest.h>

#include <cstdlib>

#include "homocurve/statistics.hpp"
#include "support.hpp"

using namespace homocurve;
using namespace homocurve::testing;

namespace {

Ensemble make_ensemble(std::vector<SphereCurve> curves, QuotientMode mode) {
  Ensemble e;
  e.curves = std::move(curves);
  e.mode = mode;
  return e;
}

double max_point_error(const SphereCurve& a, const SphereCurve& b) {
  return (a.points() - b.points()).cwiseAbs().maxCoeff();
}

/// Curves on a single chart line through a mean pair: m ± s_i x.
std::vector<SphereCurve> rank_one_ensemble(const SrvPair& mean, const TangentVector& x, const std::vector<double>& s) {
  std::vector<SphereCurve> out;
  for (double v : s) out.push_back(curve_of(chart_point(mean, x, v)));
  return out;
}

}  // namespace

TEST(Ensemble, Validation) {
  EXPECT_THROW(make_ensemble({}, QuotientMode::Shape).validate(), Error);
  std::mt19937_64 rng(1);
  Ensemble e = make_ensemble({random_smooth_curve(3, 10, rng), random_smooth_curve(3, 11, rng)}, QuotientMode::Shape);
  EXPECT_THROW(e.validate(), Error);
}

TEST(KarcherMean, SingletonIsFixedPoint) {
  std::mt19937_64 rng(2);
  const SphereCurve c = random_smooth_curve(3, 40, rng, 1.5);
  for (QuotientMode mode : {QuotientMode::Parametrized, QuotientMode::Shape}) {
    const KarcherResult r = karcher_mean(make_ensemble({c}, mode), OptimizerConfig{});
    EXPECT_LT(max_point_error(r.mean, c), 1e-10);
  }
}

TEST(KarcherMean, TwoCurvesGiveGeodesicMidpoint) {
  std::mt19937_64 rng(3);
  OptimizerConfig cfg;
  const SphereCurve a = random_smooth_curve(3, 50, rng, 1.5);
  const SphereCurve b = random_smooth_curve(3, 50, rng, 1.5);
  const KarcherResult r = karcher_mean(make_ensemble({a, b}, QuotientMode::Parametrized), cfg);
  const std::vector<SphereCurve> frames = geodesic_M(a, b, cfg, 3);
  EXPECT_LT(max_point_error(r.mean, frames[1]), 1e-6);
}

TEST(KarcherMean, ObjectiveNonIncreasing) {
  std::mt19937_64 rng(4);
  OptimizerConfig cfg;
  std::vector<SphereCurve> curves;
  for (int i = 0; i < 12; ++i) curves.push_back(random_smooth_curve(3, 40, rng, 1.5));
  for (QuotientMode mode : {QuotientMode::Parametrized, QuotientMode::Shape, QuotientMode::ShapeModRotation}) {
    const KarcherResult r = karcher_mean(make_ensemble(curves, mode), cfg);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
    EXPECT_GE(r.history.size(), 1u);
  }
}

TEST(KarcherMean, EquivariantInRotationQuotient) {
  std::mt19937_64 rng(5);
  OptimizerConfig cfg;
  std::vector<SphereCurve> curves;
  std::vector<SphereCurve> rotated;
  const Rotation g = random_rotation(3, rng);
  for (int i = 0; i < 6; ++i) {
    curves.push_back(random_smooth_curve(3, 40, rng, 1.5));
    rotated.push_back(rotate_curve(g, curves.back()));
  }
  const KarcherResult a = karcher_mean(make_ensemble(curves, QuotientMode::ModRotation), cfg);
  const KarcherResult b = karcher_mean(make_ensemble(rotated, QuotientMode::ModRotation), cfg);
  EXPECT_LT(distance_mod_rotation(a.mean, b.mean, cfg).cost, 1e-6);
}

TEST(TangentPca, IdenticalCurvesHaveZeroSpectrum) {
  std::mt19937_64 rng(6);
  const SphereCurve c = random_smooth_curve(3, 30, rng, 1.5);
  const Ensemble e = make_ensemble({c, c, c}, QuotientMode::Parametrized);
  const PcaResult r = tangent_pca(e, srv_of(c), OptimizerConfig{});
  EXPECT_LT(r.eigenvalues.cwiseAbs().maxCoeff(), 1e-20);
  EXPECT_TRUE(r.directions.empty());
}

TEST(TangentPca, RankOneEnsembleAndTraceIdentity) {
  std::mt19937_64 rng(7);
  OptimizerConfig cfg;
  const SrvPair mean = srv_of(random_smooth_curve(3, 40, rng, 1.5));
  // Orthogonal to the K-orbit, so the chart line is a minimizing direction.
  const TangentVector x = horizontal_part(mean, {Skew::zero(3), random_kperp_q(3, 40, rng, 0.3)});
  const Ensemble e =
      make_ensemble(rank_one_ensemble(mean, x, {-1.0, -0.5, 0.5, 1.0}), QuotientMode::Parametrized);
  const PcaResult r = tangent_pca(e, mean, cfg);
  ASSERT_GE(r.eigenvalues.size(), 2);
  EXPECT_GT(r.eigenvalues(0), 0.0);
  for (Eigen::Index k = 1; k < r.eigenvalues.size(); ++k) EXPECT_LT(r.eigenvalues(k), 1e-8 * r.eigenvalues(0));

  // Sum of eigenvalues equals the mean squared norm of the shooting vectors.
  const std::vector<SrvPair> pairs{srv_of(e.curves[0]), srv_of(e.curves[1]), srv_of(e.curves[2]), srv_of(e.curves[3])};
  double msq = 0.0;
  for (const SrvPair& p : pairs) {
    const AlignmentResult a = align_pairs(mean, p, QuotientMode::Parametrized, cfg);
    msq += std::pow(tangent_norm(shooting_vector(mean, aligned_pair(p, a))), 2) / 4.0;
  }
  EXPECT_NEAR(r.eigenvalues.sum(), msq, 1e-10);
}

TEST(TangentPca, DirectionsOrthonormalAndSpectrumSorted) {
  std::mt19937_64 rng(8);
  OptimizerConfig cfg;
  std::vector<SphereCurve> curves;
  for (int i = 0; i < 8; ++i) curves.push_back(random_smooth_curve(3, 30, rng, 1.5));
  const Ensemble e = make_ensemble(curves, QuotientMode::Shape);
  const KarcherResult m = karcher_mean(e, cfg);
  const PcaResult r = tangent_pca(e, m.mean_pair, cfg);
  for (Eigen::Index k = 1; k < r.eigenvalues.size(); ++k) EXPECT_LE(r.eigenvalues(k), r.eigenvalues(k - 1));
  EXPECT_GE(r.eigenvalues.minCoeff(), -1e-10);
  for (std::size_t i = 0; i < r.directions.size(); ++i) {
    for (std::size_t j = 0; j < r.directions.size(); ++j) {
      EXPECT_NEAR(tangent_inner(r.directions[i], r.directions[j]), i == j ? 1.0 : 0.0, 1e-8);
    }
  }
}

TEST(TangentPca, SpectrumInvariantUnderGlobalRotation) {
  std::mt19937_64 rng(9);
  OptimizerConfig cfg;
  const Rotation g = random_rotation(3, rng);
  std::vector<SphereCurve> curves;
  std::vector<SphereCurve> rotated;
  for (int i = 0; i < 6; ++i) {
    curves.push_back(random_smooth_curve(3, 30, rng, 1.5));
    rotated.push_back(rotate_curve(g, curves.back()));
  }
  const Ensemble e1 = make_ensemble(curves, QuotientMode::ModRotation);
  const Ensemble e2 = make_ensemble(rotated, QuotientMode::ModRotation);
  const SrvPair mean = srv_of(curves[0]);
  const SrvPair mean_rot = srv_of(rotated[0]);
  const PcaResult a = tangent_pca(e1, mean, cfg);
  const PcaResult b = tangent_pca(e2, mean_rot, cfg);
  EXPECT_LT((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PrincipalGeodesic, FramesCentredAndSymmetric) {
  std::mt19937_64 rng(10);
  OptimizerConfig cfg;
  const SrvPair mean = srv_of(random_smooth_curve(3, 40, rng, 1.5));
  const TangentVector x = horizontal_part(mean, {Skew::zero(3), random_kperp_q(3, 40, rng, 0.3)});
  const Ensemble e = make_ensemble(rank_one_ensemble(mean, x, {-1.0, -0.3, 0.4, 1.1}), QuotientMode::Parametrized);
  const PcaResult r = tangent_pca(e, mean, cfg);
  const std::vector<SphereCurve> frames = principal_geodesic(r, 0, 2.0, 5);
  ASSERT_EQ(frames.size(), 5u);
  EXPECT_LT(max_point_error(frames[2], r.mean), 1e-10);
  EXPECT_NEAR(distance_M(frames[0], r.mean, cfg), distance_M(frames[4], r.mean, cfg), 1e-6);

  const double s = 0.7;
  const TangentVector back = shooting_vector(r.mean_pair, chart_point(r.mean_pair, r.directions[0], s));
  EXPECT_NEAR(tangent_norm(back), s * tangent_norm(r.directions[0]), 1e-8);
  EXPECT_THROW(principal_geodesic(r, 5, 1.0, 3), Error);
}

TEST(DistanceMatrix, SingletonAndOrbitCollapse) {
  std::mt19937_64 rng(11);
  OptimizerConfig cfg;
  const SphereCurve c = random_smooth_curve(3, 30, rng, 1.5);
  const DistanceMatrix one = distance_matrix(make_ensemble({c}, QuotientMode::Shape), cfg);
  EXPECT_EQ(one.d.rows(), 1);
  EXPECT_EQ(one.d(0, 0), 0.0);
  const DistanceMatrix orbit =
      distance_matrix(make_ensemble({c, rotate_curve(random_rotation(3, rng), c)}, QuotientMode::ModRotation), cfg);
  EXPECT_LT(orbit.d.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DistanceMatrix, SymmetricDeterministicAndPermutationCovariant) {
  std::mt19937_64 rng(12);
  OptimizerConfig cfg;
  std::vector<SphereCurve> curves;
  for (int i = 0; i < 6; ++i) curves.push_back(random_smooth_curve(3, 30, rng, 1.5));
  const DistanceMatrix a = distance_matrix(make_ensemble(curves, QuotientMode::Shape), cfg, 1);
  const DistanceMatrix b = distance_matrix(make_ensemble(curves, QuotientMode::Shape), cfg, 3);
  EXPECT_EQ((a.d - a.d.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(a.d.diagonal().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.d - b.d).cwiseAbs().maxCoeff(), 0.0);

  // Reversing the order conjugates D by the reversal permutation. With the
  // sampled K-solver nothing depends on the pair seed, so this is exact.
  std::vector<SphereCurve> reversed(curves.rbegin(), curves.rend());
  const DistanceMatrix c = distance_matrix(make_ensemble(reversed, QuotientMode::ModRotation), cfg);
  const DistanceMatrix d = distance_matrix(make_ensemble(curves, QuotientMode::ModRotation), cfg);
  const int n = static_cast<int>(curves.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Swapping the arguments of a pair is not bitwise symmetric, so compare
      // only the orientation-preserving entries exactly.
      const int ri = n - 1 - i;
      const int rj = n - 1 - j;
      if (i < j && ri < rj) EXPECT_EQ(c.d(i, j), d.d(ri, rj));
      EXPECT_NEAR(c.d(i, j), d.d(ri, rj), 1e-6);
    }
  }
}

TEST(DistanceMatrix, PairCount) {
  // N = 150 gives 11175 unordered pairs.
  EXPECT_EQ(150 * 149 / 2, 11175);
}

TEST(PairSeed, IndependentOfSchedulingAndDistinct) {
  EXPECT_EQ(pair_seed(7, 3, 4), pair_seed(7, 3, 4));
  EXPECT_NE(pair_seed(7, 3, 4), pair_seed(7, 4, 3));
  EXPECT_NE(pair_seed(7, 3, 4), pair_seed(8, 3, 4));
}

TEST(ResolveJobs, ExplicitEnvironmentAndDefault) {
  EXPECT_EQ(resolve_jobs(3), 3);
  setenv("HOMOCURVE_JOBS", "5", 1);
  EXPECT_EQ(resolve_jobs(0), 5);
  unsetenv("HOMOCURVE_JOBS");
  EXPECT_GE(resolve_jobs(0), 1);
}

TEST(ClassicalMds, ZeroMatrixAtOrigin) {
  const MdsResult r = classical_mds(Mat::Zero(4, 4), 2);
  EXPECT_EQ(r.coords.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(r.padded);
}

TEST(ClassicalMds, EquilateralTriangle) {
  Mat d = Mat::Ones(3, 3) - Mat::Identity(3, 3);
  const MdsResult r = classical_mds(d, 2);
  EXPECT_FALSE(r.padded);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR((r.coords.row(i) - r.coords.row(j)).norm(), d(i, j), 1e-9);
  }
  EXPECT_LT(r.coords.colwise().sum().norm(), 1e-12);
}

TEST(ClassicalMds, PlanarPointsRoundTrip) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 12;
  Mat pts(n, 2);
  for (int i = 0; i < n; ++i) pts.row(i) << normal(rng), normal(rng);
  Mat d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
  }
  const MdsResult r = classical_mds(d, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) EXPECT_NEAR((r.coords.row(i) - r.coords.row(j)).norm(), d(i, j), 1e-9);
  }
  EXPECT_LT(r.negative_mass, 1e-9);
  // Asking for more dimensions than the rank pads with zeros.
  const MdsResult r3 = classical_mds(d, 4);
  EXPECT_TRUE(r3.padded);
  EXPECT_LT(r3.coords.col(3).norm(), 1e-12);
}

TEST(ClassicalMds, NonEuclideanInputReportsNegativeMass) {
  Mat d(4, 4);
  d << 0, 1, 1, 3, 1, 0, 1, 1, 1, 1, 0, 1, 3, 1, 1, 0;
  EXPECT_GT(classical_mds(d, 2).negative_mass, 0.0);
  Mat bad = d;
  bad(0, 1) = 2.0;
  EXPECT_THROW(classical_mds(bad, 2), Error);
}
