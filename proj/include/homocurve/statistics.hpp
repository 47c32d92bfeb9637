#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homocurve/alignment.hpp"

namespace homocurve {

/// Curves sharing one grid, analysed in one quotient mode.
struct Ensemble {
  std::vector<SphereCurve> curves;
  QuotientMode mode = QuotientMode::Shape;
  std::vector<std::string> ids;

  /// Throws EmptyEnsemble or GridMismatch.
  void validate() const;
  std::size_t size() const { return curves.size(); }
};

struct KarcherResult {
  SphereCurve mean;
  SrvPair mean_pair;
  /// Σ d²(mean, β_i) for every accepted iterate, non-increasing.
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
};

struct KarcherConfig {
  int max_iters = 50;
  double tol = 1e-8;
  /// Worker threads for the per-curve alignments; 0 picks a default.
  int jobs = 0;
};

KarcherResult karcher_mean(const Ensemble& ens, const OptimizerConfig& cfg, const KarcherConfig& kc = {});

/// Shooting vector of an aligned pair in the linear chart at the mean:
/// (log(ᾱ0⁻¹ α̃(0)), q̃ - q̄).
TangentVector shooting_vector(const SrvPair& mean, const SrvPair& aligned);
/// ⟨u, v⟩ = ⟨u0, v0⟩ + ∫⟨du, dv⟩ dt.
double tangent_inner(const TangentVector& u, const TangentVector& v);
double tangent_norm(const TangentVector& u);
/// Point of the chart: (ᾱ0 exp(s u0), q̄ + s du).
SrvPair chart_point(const SrvPair& mean, const TangentVector& u, double s);

struct PcaResult {
  SphereCurve mean;
  SrvPair mean_pair;
  /// All N eigenvalues of the covariance, descending.
  Vec eigenvalues;
  /// Orthonormal directions for the strictly positive eigenvalues.
  std::vector<TangentVector> directions;
  /// Coordinates of each shooting vector along the directions (N × K).
  Mat scores;
};

PcaResult tangent_pca(const Ensemble& ens, const SrvPair& mean_pair, const OptimizerConfig& cfg, int jobs = 0);

/// Frames at s = -spread√λ_k .. +spread√λ_k along direction k.
std::vector<SphereCurve> principal_geodesic(const PcaResult& res, int component, double spread, int frames);

struct DistanceMatrix {
  Mat d;
  /// Messages for pairs whose alignment failed; their entries are NaN.
  std::vector<std::string> failures;
};

/// Worker count: `requested` if positive, else HOMOCURVE_JOBS, else the
/// hardware concurrency.
int resolve_jobs(int requested);

/// Per-pair seed derived from (seed, i, j), independent of scheduling.
std::uint64_t pair_seed(std::uint64_t seed, std::size_t i, std::size_t j);

DistanceMatrix distance_matrix(const Ensemble& ens, const OptimizerConfig& cfg, int jobs = 0);

struct MdsResult {
  /// N × dims, centred.
  Mat coords;
  /// Eigenvalues of the double-centred matrix, descending.
  Vec eigenvalues;
  /// dims exceeded the number of positive eigenvalues; extra columns are zero.
  bool padded = false;
  /// Sum of |negative eigenvalues|, zero for Euclidean-embeddable input.
  double negative_mass = 0.0;
};

MdsResult classical_mds(const Mat& d, int dims);

/// Runs body(i) for i in [0, count) on `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace homocurve
