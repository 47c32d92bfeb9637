#include "homocurve/lie_group.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace homocurve {
namespace {

constexpr double kRotationTol = 1e-10;
constexpr double kAmbiguityWindow = 1e-9;
constexpr double kRobustWindow = 1e-6;

Eigen::Vector3d vee3(const Mat& w) { return {w(2, 1), w(0, 2), w(1, 0)}; }

Mat hat3(const Eigen::Vector3d& w) {
  Mat m(3, 3);
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Mat exp3(const Mat& v) {
  const Eigen::Vector3d w = vee3(v);
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;
  double b;
  if (theta < 1e-4) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat k = hat3(w);
  return Mat::Identity(3, 3) + a * k + b * (k * k);
}

LogResult log3(const Mat& r) {
  const double c = 0.5 * (r.trace() - 1.0);
  const Eigen::Vector3d s_vec = 0.5 * vee3(r - r.transpose());
  const double s = s_vec.norm();
  const double theta = std::atan2(s, c);
  const double pi = std::numbers::pi;

  LogResult out;
  Eigen::Vector3d omega;
  if (theta < 1e-6) {
    omega = (1.0 + theta * theta / 6.0) * s_vec;
  } else if (pi - theta < kRobustWindow) {
    // Axis from the symmetric part: (R + Rᵗ)/2 = c I + (1 - c) a aᵗ.
    const Mat sym = 0.5 * (r + r.transpose());
    const Mat aat = (sym - c * Mat::Identity(3, 3)) / (1.0 - c);
    Eigen::Index k = 0;
    aat.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = aat.col(k) / std::sqrt(std::max(aat(k, k), 1e-300));
    axis.normalize();
    out.ambiguous = pi - theta < kAmbiguityWindow;
    if (out.ambiguous) {
      Eigen::Index j = 0;
      axis.cwiseAbs().maxCoeff(&j);
      if (axis(j) < 0.0) axis = -axis;
    } else if (axis.dot(s_vec) < 0.0) {
      axis = -axis;
    }
    omega = theta * axis;
  } else {
    omega = (theta / s) * s_vec;
  }
  out.value = Skew::trusted(hat3(omega));
  return out;
}

// Real Schur form of an orthogonal matrix is block diagonal with 2x2
// rotation blocks and ±1 entries; the log is assembled block by block.
LogResult log_general(const Mat& r) {
  const int m = static_cast<int>(r.rows());
  Eigen::RealSchur<Mat> schur(r);
  const Mat& t = schur.matrixT();
  const Mat& u = schur.matrixU();
  const double pi = std::numbers::pi;

  LogResult out;
  Mat l = Mat::Zero(m, m);
  std::vector<int> minus_one;
  int i = 0;
  while (i < m) {
    if (i + 1 < m && std::abs(t(i + 1, i)) > 1e-300) {
      const double sn = 0.5 * (t(i + 1, i) - t(i, i + 1));
      const double cs = 0.5 * (t(i, i) + t(i + 1, i + 1));
      const double theta = std::atan2(sn, cs);
      if (pi - std::abs(theta) < kAmbiguityWindow) out.ambiguous = true;
      l(i + 1, i) = theta;
      l(i, i + 1) = -theta;
      i += 2;
    } else {
      if (t(i, i) < 0.0) minus_one.push_back(i);
      ++i;
    }
  }
  for (std::size_t k = 0; k + 1 < minus_one.size(); k += 2) {
    const int a = minus_one[k];
    const int b = minus_one[k + 1];
    l(b, a) = pi;
    l(a, b) = -pi;
    out.ambiguous = true;
  }
  out.value = Skew(u * l * u.transpose());
  return out;
}

}  // namespace

Rotation::Rotation(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw Error(ErrorKind::NotARotation, "rotation matrix must be square with dimension >= 2");
  }
  if (!is_valid(kRotationTol)) {
    std::ostringstream os;
    os << "matrix is not in SO(" << m_.rows() << ") to tolerance " << kRotationTol;
    throw Error(ErrorKind::NotARotation, os.str());
  }
}

Rotation Rotation::identity(int dim) { return trusted(Mat::Identity(dim, dim)); }

Rotation Rotation::trusted(Mat m) { return Rotation(std::move(m), TrustedTag{}); }

bool Rotation::is_valid(double tol) const {
  const auto n = m_.rows();
  if ((m_.transpose() * m_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m_.determinant() - 1.0) <= tol;
}

Skew::Skew(const Mat& x) {
  if (x.rows() != x.cols()) throw Error(ErrorKind::DimensionMismatch, "skew matrix must be square");
  m_ = 0.5 * (x - x.transpose());
}

Skew Skew::zero(int dim) { return trusted(Mat::Zero(dim, dim)); }

Skew Skew::basis(int dim, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= dim || j >= dim) {
    throw Error(ErrorKind::InvalidArgument, "basis element needs distinct in-range indices");
  }
  Mat m = Mat::Zero(dim, dim);
  m(i, j) = 1.0;
  m(j, i) = -1.0;
  return trusted(std::move(m));
}

Skew Skew::trusted(Mat x) {
  Skew s;
  s.m_ = std::move(x);
  return s;
}

Skew& Skew::operator+=(const Skew& o) {
  if (m_.size() == 0) {
    m_ = o.m_;
    return *this;
  }
  m_ += o.m_;
  return *this;
}

Skew& Skew::operator-=(const Skew& o) {
  if (m_.size() == 0) {
    m_ = -o.m_;
    return *this;
  }
  m_ -= o.m_;
  return *this;
}

Skew& Skew::operator*=(double s) {
  m_ *= s;
  return *this;
}

double inner(const Skew& x, const Skew& y) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::DimensionMismatch, "inner: dimension mismatch");
  return x.matrix().cwiseProduct(y.matrix()).sum();
}

Rotation group_exp(const Skew& v) {
  if (v.dim() == 3) return Rotation::trusted(exp3(v.matrix()));
  Mat e = v.matrix().exp();
  return Rotation::trusted(std::move(e));
}

LogResult group_log_flagged(const Rotation& a) {
  if (a.dim() == 3) return log3(a.matrix());
  return log_general(a.matrix());
}

double squared_geodesic_distance(const Rotation& a, const Rotation& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "distance: dimension mismatch");
  if (a.dim() == 3) {
    const Mat p = a.matrix().transpose() * b.matrix();
    const double c = 0.5 * (p.trace() - 1.0);
    const double s = 0.5 * vee3(p - p.transpose()).norm();
    const double theta = std::atan2(s, c);
    return 2.0 * theta * theta;
  }
  return group_log(a.inverse() * b).squared_norm();
}

double geodesic_distance(const Rotation& a, const Rotation& b) {
  return std::sqrt(squared_geodesic_distance(a, b));
}

SubalgebraBasis SubalgebraBasis::standard(int dim) {
  SubalgebraBasis b;
  b.dim = dim;
  const int n = dim - 1;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) b.k_basis.push_back(Skew::basis(dim, i, j));
  }
  for (int i = 0; i < n; ++i) b.kperp_basis.push_back(Skew::basis(dim, i, n));
  return b;
}

namespace {
Skew project_onto(const Skew& x, const std::vector<Skew>& basis, int dim) {
  Mat acc = Mat::Zero(dim, dim);
  for (const Skew& e : basis) acc += (inner(x, e) / e.squared_norm()) * e.matrix();
  return Skew::trusted(std::move(acc));
}
}  // namespace

Skew proj_k(const Skew& x, const SubalgebraBasis& basis) {
  if (x.dim() != basis.dim) throw Error(ErrorKind::DimensionMismatch, "proj_k: dimension mismatch");
  return project_onto(x, basis.k_basis, basis.dim);
}

Skew proj_kperp(const Skew& x, const SubalgebraBasis& basis) {
  if (x.dim() != basis.dim) throw Error(ErrorKind::DimensionMismatch, "proj_kperp: dimension mismatch");
  return project_onto(x, basis.kperp_basis, basis.dim);
}

Skew proj_k(const Skew& x) {
  Mat m = x.matrix();
  const auto n = m.rows() - 1;
  m.row(n).setZero();
  m.col(n).setZero();
  return Skew::trusted(std::move(m));
}

Skew proj_kperp(const Skew& x) {
  const auto n = x.matrix().rows() - 1;
  Mat m = Mat::Zero(n + 1, n + 1);
  m.row(n) = x.matrix().row(n);
  m.col(n) = x.matrix().col(n);
  return Skew::trusted(std::move(m));
}

Skew proj_k_of(const Mat& m) { return proj_k(Skew(m)); }

bool in_k(const Rotation& y, double tol) {
  const Mat& m = y.matrix();
  const auto n = m.rows() - 1;
  if (std::abs(m(n, n) - 1.0) > tol) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m(i, n)) > tol || std::abs(m(n, i)) > tol) return false;
  }
  return true;
}

Skew conjugate_any(const Rotation& y, const Skew& x) {
  return Skew::trusted(y.matrix().transpose() * x.matrix() * y.matrix());
}

Skew conjugate(const Rotation& y, const Skew& x) {
  if (y.dim() != x.dim()) throw Error(ErrorKind::DimensionMismatch, "conjugate: dimension mismatch");
  if (!in_k(y)) throw Error(ErrorKind::YNotInK, "conjugating element is not in the embedded SO(n)");
  // yᵗxy is skew only up to rounding; re-antisymmetrize.
  return Skew(y.matrix().transpose() * x.matrix() * y.matrix());
}

Vec kperp_coords(const Skew& x) {
  const auto n = x.matrix().rows() - 1;
  return x.matrix().col(n).head(n);
}

Skew from_kperp_coords(const Vec& u) {
  const auto n = u.size();
  Mat m = Mat::Zero(n + 1, n + 1);
  m.col(n).head(n) = u;
  m.row(n).head(n) = -u.transpose();
  return Skew::trusted(std::move(m));
}

Rotation embed_in_k(const Mat& block) {
  const auto n = block.rows();
  Mat m = Mat::Identity(n + 1, n + 1);
  m.topLeftCorner(n, n) = block;
  return Rotation(std::move(m));
}

Rotation so2_in_k(double theta) {
  Mat m = Mat::Identity(3, 3);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return Rotation::trusted(std::move(m));
}

Rotation efficient_rotation(const Vec& p, const Vec& q) {
  if (p.size() != q.size()) throw Error(ErrorKind::DimensionMismatch, "efficient_rotation: dimension mismatch");
  if (1.0 + p.dot(q) <= 1e-12) {
    throw Error(ErrorKind::AntipodalPoints, "no unique shortest rotation between antipodal points");
  }
  const auto m = p.size();
  const Vec w = p + q;
  const Mat reflect_w = Mat::Identity(m, m) - (2.0 / w.squaredNorm()) * (w * w.transpose());
  const Mat reflect_p = Mat::Identity(m, m) - 2.0 * (p * p.transpose());
  return Rotation::trusted(reflect_w * reflect_p);
}

Rotation nearest_rotation(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  const Mat& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(u.cols() - 1) *= -1.0;
  return Rotation::trusted(u * v.transpose());
}

Rotation random_rotation(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return Rotation::trusted(std::move(q));
}

Rotation frechet_mean(const std::vector<Rotation>& points, const Rotation& init, int max_iters,
                      double tol) {
  if (points.empty()) throw Error(ErrorKind::EmptyEnsemble, "frechet_mean of no points");
  Rotation mean = init;
  const double inv_n = 1.0 / static_cast<double>(points.size());
  for (int it = 0; it < max_iters; ++it) {
    Skew step = Skew::zero(mean.dim());
    const Rotation mean_inv = mean.inverse();
    for (const Rotation& x : points) step += group_log(mean_inv * x);
    step *= inv_n;
    mean = mean * group_exp(step);
    if (step.norm() < tol) break;
  }
  return nearest_rotation(mean.matrix());
}

}  // namespace homocurve
