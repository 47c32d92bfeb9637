#include "homocurve/statistics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>

namespace homocurve {
namespace {

std::vector<SrvPair> srv_all(const Ensemble& ens, int jobs) {
  std::vector<std::optional<SrvPair>> tmp(ens.size());
  parallel_for(ens.size(), jobs, [&](std::size_t i) { tmp[i] = srv_of(ens.curves[i]); });
  std::vector<SrvPair> out;
  out.reserve(ens.size());
  for (auto& p : tmp) out.push_back(std::move(*p));
  return out;
}

struct Aligned {
  std::vector<SrvPair> pairs;
  double objective = 0.0;
};

Aligned align_all(const SrvPair& mean, const std::vector<SrvPair>& pairs, QuotientMode mode,
                  const OptimizerConfig& cfg, int jobs) {
  std::vector<std::optional<SrvPair>> tmp(pairs.size());
  std::vector<double> sq(pairs.size(), 0.0);
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    OptimizerConfig local = cfg;
    local.seed = pair_seed(cfg.seed, i, pairs.size());
    const AlignmentResult r = align_pairs(mean, pairs[i], mode, local);
    tmp[i] = aligned_pair(pairs[i], r);
    sq[i] = r.cost * r.cost;
  });
  Aligned out;
  out.pairs.reserve(pairs.size());
  for (auto& p : tmp) out.pairs.push_back(std::move(*p));
  for (double s : sq) out.objective += s;
  return out;
}

SrvPair average(const SrvPair& ref, const std::vector<SrvPair>& aligned) {
  const double inv_n = 1.0 / static_cast<double>(aligned.size());
  std::vector<Skew> q(ref.q.size(), Skew::zero(ref.dim()));
  std::vector<Rotation> starts;
  starts.reserve(aligned.size());
  bool horizontal = true;
  for (const SrvPair& a : aligned) {
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += a.q[k];
    starts.push_back(a.start);
    horizontal = horizontal && a.horizontal;
  }
  for (Skew& x : q) x *= inv_n;
  return SrvPair{frechet_mean(starts, ref.start), std::move(q), horizontal};
}

}  // namespace

void Ensemble::validate() const {
  if (curves.empty()) throw Error(ErrorKind::EmptyEnsemble, "ensemble has no curves");
  for (const SphereCurve& c : curves) {
    if (c.segments() != curves.front().segments() || c.ambient_dim() != curves.front().ambient_dim()) {
      throw Error(ErrorKind::GridMismatch, "ensemble curves differ in T or dimension");
    }
  }
  if (!ids.empty() && ids.size() != curves.size()) {
    throw Error(ErrorKind::InvalidArgument, "ensemble ids do not match the curve count");
  }
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HOMOCURVE_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t pair_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
  // splitmix64 finalizer over the packed triple.
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)) ^ (0xbf58476d1ce4e5b9ULL * (j + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(resolve_jobs(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

KarcherResult karcher_mean(const Ensemble& ens, const OptimizerConfig& cfg, const KarcherConfig& kc) {
  ens.validate();
  cfg.validate();
  const std::vector<SrvPair> pairs = srv_all(ens, kc.jobs);

  std::size_t first = 0;
  if (ens.size() > 2) {
    const DistanceMatrix dm = distance_matrix(ens, cfg, kc.jobs);
    dm.d.array().square().rowwise().sum().minCoeff(&first);
  }

  KarcherResult res{ens.curves[first], pairs[first], {}, 0, false};
  SrvPair mean = pairs[first];
  Aligned cur = align_all(mean, pairs, ens.mode, cfg, kc.jobs);
  res.history.push_back(cur.objective);

  for (int it = 1; it <= kc.max_iters; ++it) {
    SrvPair candidate = average(mean, cur.pairs);
    Aligned next = align_all(candidate, pairs, ens.mode, cfg, kc.jobs);
    res.iterations = it;
    if (next.objective > cur.objective) {
      // Alignment against the new mean got worse: keep the previous iterate.
      res.converged = true;
      break;
    }
    const double decrease = cur.objective - next.objective;
    mean = std::move(candidate);
    cur = std::move(next);
    res.history.push_back(cur.objective);
    if (decrease < kc.tol) {
      res.converged = true;
      break;
    }
  }
  res.mean_pair = mean;
  res.mean = curve_of(mean);
  return res;
}

TangentVector shooting_vector(const SrvPair& mean, const SrvPair& aligned) {
  if (mean.segments() != aligned.segments()) throw Error(ErrorKind::GridMismatch, "shooting_vector: grids differ");
  TangentVector v{group_log(mean.start.inverse() * aligned.start), {}};
  v.dq.reserve(mean.q.size());
  for (std::size_t k = 0; k < mean.q.size(); ++k) v.dq.push_back(aligned.q[k] - mean.q[k]);
  return v;
}

double tangent_inner(const TangentVector& u, const TangentVector& v) {
  return inner(u.at_start, v.at_start) + l2_inner(u.dq, v.dq);
}

double tangent_norm(const TangentVector& u) { return std::sqrt(tangent_inner(u, u)); }

SrvPair chart_point(const SrvPair& mean, const TangentVector& u, double s) {
  SrvPair p{mean.start * group_exp(u.at_start * s), mean.q, mean.horizontal};
  for (std::size_t k = 0; k < p.q.size(); ++k) p.q[k] += u.dq[k] * s;
  return p;
}

PcaResult tangent_pca(const Ensemble& ens, const SrvPair& mean_pair, const OptimizerConfig& cfg, int jobs) {
  ens.validate();
  const std::vector<SrvPair> pairs = srv_all(ens, jobs);
  const Aligned aligned = align_all(mean_pair, pairs, ens.mode, cfg, jobs);
  const int n = static_cast<int>(pairs.size());

  std::vector<TangentVector> x;
  x.reserve(n);
  for (const SrvPair& a : aligned.pairs) x.push_back(shooting_vector(mean_pair, a));

  // Covariance (1/N) Σ x xᵗ through its N × N Gram matrix.
  Mat gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) gram(i, j) = gram(j, i) = tangent_inner(x[i], x[j]) / n;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Vec vals = eig.eigenvalues().reverse();
  const Mat vecs = eig.eigenvectors().rowwise().reverse();

  PcaResult res{curve_of(mean_pair), mean_pair, vals, {}, Mat()};
  const double floor = 1e-13 * std::max(vals.size() ? vals(0) : 0.0, 1e-300);
  for (int k = 0; k < n; ++k) {
    if (!(vals(k) > floor)) break;
    TangentVector d{Skew::zero(mean_pair.dim()), std::vector<Skew>(mean_pair.q.size(), Skew::zero(mean_pair.dim()))};
    for (int i = 0; i < n; ++i) {
      d.at_start += x[i].at_start * vecs(i, k);
      for (std::size_t t = 0; t < d.dq.size(); ++t) d.dq[t] += x[i].dq[t] * vecs(i, k);
    }
    const double scale = 1.0 / tangent_norm(d);
    d.at_start *= scale;
    for (Skew& q : d.dq) q *= scale;
    res.directions.push_back(std::move(d));
  }
  res.scores.resize(n, static_cast<Eigen::Index>(res.directions.size()));
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < res.directions.size(); ++k) res.scores(i, k) = tangent_inner(x[i], res.directions[k]);
  }
  return res;
}

std::vector<SphereCurve> principal_geodesic(const PcaResult& res, int component, double spread, int frames) {
  if (component < 0 || component >= static_cast<int>(res.directions.size())) {
    throw Error(ErrorKind::IndexOutOfRange, "principal component " + std::to_string(component) + " out of range");
  }
  if (frames < 2) throw Error(ErrorKind::InvalidArgument, "principal_geodesic needs at least two frames");
  const double half = spread * std::sqrt(std::max(res.eigenvalues(component), 0.0));
  std::vector<SphereCurve> out;
  out.reserve(frames);
  for (int j = 0; j < frames; ++j) {
    const double s = -half + 2.0 * half * j / (frames - 1);
    out.push_back(curve_of(chart_point(res.mean_pair, res.directions[component], s)));
  }
  return out;
}

DistanceMatrix distance_matrix(const Ensemble& ens, const OptimizerConfig& cfg, int jobs) {
  ens.validate();
  cfg.validate();
  const std::size_t n = ens.size();
  const std::vector<SrvPair> pairs = srv_all(ens, jobs);
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  tasks.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) tasks.emplace_back(i, j);
  }

  DistanceMatrix out{Mat::Zero(n, n), {}};
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const auto [i, j] = tasks[t];
    OptimizerConfig local = cfg;
    local.seed = pair_seed(cfg.seed, i, j);
    double d = std::numeric_limits<double>::quiet_NaN();
    try {
      d = align_pairs(pairs[i], pairs[j], ens.mode, local).cost;
    } catch (const Error& e) {
      errors[t] = "(" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what();
    }
    out.d(i, j) = d;
    out.d(j, i) = d;
  });
  for (std::string& e : errors) {
    if (!e.empty()) out.failures.push_back(std::move(e));
  }
  return out;
}

MdsResult classical_mds(const Mat& d, int dims) {
  const Eigen::Index n = d.rows();
  if (d.cols() != n) throw Error(ErrorKind::DimensionMismatch, "distance matrix must be square");
  if (dims < 1) throw Error(ErrorKind::InvalidArgument, "MDS needs dims >= 1");
  if (!d.allFinite()) throw Error(ErrorKind::InvalidArgument, "distance matrix has non-finite entries");
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, d.cwiseAbs().maxCoeff()) ||
      d.diagonal().cwiseAbs().maxCoeff() > 0.0 || d.minCoeff() < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "distance matrix must be symmetric, nonnegative, zero diagonal");
  }

  const Mat j = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
  Mat b = -0.5 * j * d.cwiseProduct(d) * j;
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(b);
  MdsResult res;
  res.eigenvalues = eig.eigenvalues().reverse();
  const Mat vecs = eig.eigenvectors().rowwise().reverse();
  res.coords = Mat::Zero(n, dims);
  const double scale = std::max(1.0, res.eigenvalues.size() ? std::abs(res.eigenvalues(0)) : 0.0);
  for (Eigen::Index k = 0; k < res.eigenvalues.size(); ++k) {
    if (res.eigenvalues(k) < 0.0) res.negative_mass -= res.eigenvalues(k);
  }
  for (int k = 0; k < dims; ++k) {
    if (k >= n || res.eigenvalues(k) <= 1e-12 * scale) {
      res.padded = true;
      continue;
    }
    res.coords.col(k) = vecs.col(k) * std::sqrt(res.eigenvalues(k));
  }
  res.coords.rowwise() -= res.coords.colwise().mean();
  return res;
}

}  // namespace homocurve
