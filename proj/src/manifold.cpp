#include "mom/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mom {

namespace {

// Below this cosine gap the sphere log uses the series limit
// arccos(t) / sqrt(1 - t^2) -> 1.
constexpr double kSeriesGap = 1e-10;
constexpr double kCutLocusGap = 1e-12;

void require_same(const ManifoldId& a, const ManifoldId& b) {
  if (!(a == b)) {
    throw Error(ErrorKind::ManifoldMismatch, a.name() + " vs " + b.name());
  }
}

void require_length(const ManifoldId& id, Eigen::Index length) {
  if (length != id.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                id.name() + " expects ambient dimension " +
                    std::to_string(id.ambient_dim()) + ", got " +
                    std::to_string(length));
  }
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Preshape-sphere log of an already aligned (or plain sphere) pair.
Eigen::VectorXd sphere_log(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const double t = std::clamp(p.dot(q), -1.0, 1.0);
  Eigen::VectorXd w = q - t * p;
  const double s = w.norm();
  if (t > 1.0 - kSeriesGap) {
    return w;
  }
  if (s < kCutLocusGap && t < 0.0) {
    throw Error(ErrorKind::CutLocus, "log of an antipodal point");
  }
  return (std::atan2(s, t) / s) * w;
}

double sphere_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const double t = p.dot(q);
  return std::atan2((q - t * p).norm(), t);
}

Eigen::VectorXd sphere_exp(const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
  const double theta = v.norm();
  if (theta == 0.0) return p;
  Eigen::VectorXd out = std::cos(theta) * p + (std::sin(theta) / theta) * v;
  out.normalize();
  return out;
}

Eigen::VectorXd centered(const Eigen::VectorXd& z) {
  const Eigen::Index k = z.size() / 2;
  double mx = 0.0;
  double my = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    mx += z[2 * i];
    my += z[2 * i + 1];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  Eigen::VectorXd out = z;
  for (Eigen::Index i = 0; i < k; ++i) {
    out[2 * i] -= mx;
    out[2 * i + 1] -= my;
  }
  return out;
}

double centroid_offset(const Eigen::VectorXd& z) {
  const Eigen::Index k = z.size() / 2;
  double mx = 0.0;
  double my = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    mx += z[2 * i];
    my += z[2 * i + 1];
  }
  return std::hypot(mx, my) / static_cast<double>(k);
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

template <typename F>
Eigen::MatrixXd sym_apply(const Eigen::MatrixXd& s, F f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd mapped = eig.eigenvalues().unaryExpr(f);
  Eigen::MatrixXd out =
      eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
  return symmetrized(out);
}

}  // namespace

std::string to_string(MetricKind metric) {
  return metric == MetricKind::Intrinsic ? "intrinsic" : "extrinsic";
}

MetricKind parse_metric(const std::string& text) {
  if (text == "intrinsic") return MetricKind::Intrinsic;
  if (text == "extrinsic") return MetricKind::Extrinsic;
  throw Error(ErrorKind::ConfigError, "unknown metric '" + text + "'");
}

// ---------------------------------------------------------------------------
// ManifoldId

ManifoldId ManifoldId::sphere(int d) {
  if (d < 1) throw Error(ErrorKind::DomainError, "sphere dimension must be >= 1");
  return {ManifoldKind::Sphere, d};
}

ManifoldId ManifoldId::planar_shape(int landmarks) {
  if (landmarks < 3) {
    throw Error(ErrorKind::DomainError, "planar shapes need >= 3 landmarks");
  }
  return {ManifoldKind::PlanarShape, landmarks};
}

ManifoldId ManifoldId::spd(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "SPD size must be >= 1");
  return {ManifoldKind::Spd, n};
}

int ManifoldId::ambient_dim() const {
  switch (kind) {
    case ManifoldKind::Sphere: return param + 1;
    case ManifoldKind::PlanarShape: return 2 * param;
    case ManifoldKind::Spd: return param * param;
  }
  return 0;
}

std::string ManifoldId::name() const {
  switch (kind) {
    case ManifoldKind::Sphere: return "Sphere(" + std::to_string(param) + ")";
    case ManifoldKind::PlanarShape:
      return "PlanarShape(" + std::to_string(param) + ")";
    case ManifoldKind::Spd: return "SPD(" + std::to_string(param) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Point

Point Point::from_ambient(ManifoldId id, Eigen::VectorXd coords,
                          const Tolerances& tol) {
  require_length(id, coords.size());
  if (!coords.allFinite()) {
    throw Error(ErrorKind::InvalidPoint, "non-finite coordinates");
  }
  switch (id.kind) {
    case ManifoldKind::Sphere:
      if (std::abs(coords.norm() - 1.0) > tol.storage) {
        throw Error(ErrorKind::InvalidPoint, "sphere point is not unit norm");
      }
      break;
    case ManifoldKind::PlanarShape:
      if (centroid_offset(coords) > tol.storage) {
        throw Error(ErrorKind::InvalidPoint, "preshape is not centered");
      }
      if (std::abs(coords.norm() - 1.0) > tol.storage) {
        throw Error(ErrorKind::InvalidPoint, "preshape is not unit norm");
      }
      break;
    case ManifoldKind::Spd: {
      const Eigen::MatrixXd m = spd::unflatten(coords, id.param);
      if (max_abs(m - m.transpose()) > tol.storage * std::max(1.0, max_abs(m))) {
        throw Error(ErrorKind::InvalidPoint, "matrix is not symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
      if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw Error(ErrorKind::InvalidPoint, "matrix is not positive definite");
      }
      break;
    }
  }
  return Point(id, std::move(coords));
}

Point Point::sphere(const Eigen::VectorXd& unit_vector) {
  return from_ambient(ManifoldId::sphere(static_cast<int>(unit_vector.size()) - 1),
                      unit_vector);
}

Point Point::planar_shape(const Eigen::VectorXd& preshape) {
  if (preshape.size() % 2 != 0) {
    throw Error(ErrorKind::DimensionMismatch, "odd landmark coordinate count");
  }
  return from_ambient(
      ManifoldId::planar_shape(static_cast<int>(preshape.size() / 2)), preshape);
}

Point Point::spd(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "SPD matrix must be square");
  }
  return from_ambient(ManifoldId::spd(static_cast<int>(matrix.rows())),
                      spd::flatten(matrix));
}

Eigen::Map<const Eigen::MatrixXd> Point::matrix() const {
  const Eigen::Index n = id_.kind == ManifoldKind::Spd ? id_.param : coords_.size();
  const Eigen::Index cols = id_.kind == ManifoldKind::Spd ? id_.param : 1;
  return {coords_.data(), n, cols};
}

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(Point base) : base_(std::move(base)) {
  if (base_.manifold().kind == ManifoldKind::Spd) {
    const Eigen::MatrixXd m = base_.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXd& u = eig.eigenvectors();
    sqrt_ = symmetrized(u * root.asDiagonal() * u.transpose());
    inv_sqrt_ = symmetrized(u * root.cwiseInverse().asDiagonal() * u.transpose());
  }
}

Eigen::VectorXd Chart::log(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd& p = base_.coords();
  switch (manifold().kind) {
    case ManifoldKind::Sphere: return sphere_log(p, q);
    case ManifoldKind::PlanarShape: {
      if (std::abs(shape::hermitian_inner(p, q)) < kCutLocusGap) {
        throw Error(ErrorKind::CutLocus, "shapes at distance pi/2");
      }
      return sphere_log(p, shape::align(p, q));
    }
    case ManifoldKind::Spd: {
      const int n = manifold().param;
      const Eigen::MatrixXd inner =
          inv_sqrt_ * spd::unflatten(q, n) * inv_sqrt_;
      return spd::flatten(
          symmetrized(sqrt_ * spd::sym_log(symmetrized(inner)) * sqrt_));
    }
  }
  return {};
}

Eigen::VectorXd Chart::exp(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd& p = base_.coords();
  switch (manifold().kind) {
    case ManifoldKind::Sphere:
    case ManifoldKind::PlanarShape: return sphere_exp(p, v);
    case ManifoldKind::Spd: {
      const int n = manifold().param;
      const Eigen::MatrixXd inner =
          symmetrized(inv_sqrt_ * spd::unflatten(v, n) * inv_sqrt_);
      return spd::flatten(symmetrized(sqrt_ * spd::sym_exp(inner) * sqrt_));
    }
  }
  return {};
}

Point Chart::exp_point(const Eigen::VectorXd& v) const {
  return PointAccess::make(manifold(), exp(v));
}

double Chart::distance(const Eigen::VectorXd& q) const {
  const Eigen::VectorXd& p = base_.coords();
  switch (manifold().kind) {
    case ManifoldKind::Sphere: return sphere_distance(p, q);
    case ManifoldKind::PlanarShape: return sphere_distance(p, shape::align(p, q));
    case ManifoldKind::Spd: {
      const int n = manifold().param;
      const Eigen::MatrixXd inner =
          symmetrized(inv_sqrt_ * spd::unflatten(q, n) * inv_sqrt_);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner,
                                                         Eigen::EigenvaluesOnly);
      return eig.eigenvalues().array().log().matrix().norm();
    }
  }
  return 0.0;
}

double Chart::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  if (manifold().kind != ManifoldKind::Spd) return u.dot(v);
  const int n = manifold().param;
  const Eigen::MatrixXd a = inv_sqrt_ * spd::unflatten(u, n) * inv_sqrt_;
  const Eigen::MatrixXd b = inv_sqrt_ * spd::unflatten(v, n) * inv_sqrt_;
  return (a.array() * b.array()).sum();
}

double Chart::norm(const Eigen::VectorXd& v) const {
  if (manifold().kind != ManifoldKind::Spd) return v.norm();
  const int n = manifold().param;
  return (inv_sqrt_ * spd::unflatten(v, n) * inv_sqrt_).norm();
}

Eigen::VectorXd Chart::project_tangent(const Eigen::VectorXd& a) const {
  require_length(manifold(), a.size());
  const Eigen::VectorXd& p = base_.coords();
  switch (manifold().kind) {
    case ManifoldKind::Sphere: return a - a.dot(p) * p;
    case ManifoldKind::PlanarShape: {
      Eigen::VectorXd h = centered(a);
      const Eigen::VectorXd ip = shape::quarter_turn(p);
      h -= h.dot(p) * p;
      h -= h.dot(ip) * ip;
      return h;
    }
    case ManifoldKind::Spd: {
      const int n = manifold().param;
      return spd::flatten(symmetrized(spd::unflatten(a, n)));
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Free functions

double distance(const Point& p, const Point& q, MetricKind metric) {
  require_same(p.manifold(), q.manifold());
  if (metric == MetricKind::Extrinsic) {
    if (p.manifold().kind != ManifoldKind::Sphere) {
      throw Error(ErrorKind::UnsupportedMetric,
                  "extrinsic distance is defined only on the sphere");
    }
    return (p.coords() - q.coords()).norm();
  }
  return Chart(p).distance(q.coords());
}

void check_tangent(const TangentVector& v, const Tolerances& tol) {
  const ManifoldId& id = v.base.manifold();
  require_length(id, v.vec.size());
  const Eigen::VectorXd& p = v.base.coords();
  const double scale = std::max(1.0, v.vec.norm());
  switch (id.kind) {
    case ManifoldKind::Sphere:
      if (std::abs(v.vec.dot(p)) > tol.tangent * scale) {
        throw Error(ErrorKind::InvalidTangent, "vector not orthogonal to base");
      }
      break;
    case ManifoldKind::PlanarShape:
      if (std::abs(v.vec.dot(p)) > tol.tangent * scale ||
          std::abs(v.vec.dot(shape::quarter_turn(p))) > tol.tangent * scale) {
        throw Error(ErrorKind::InvalidTangent,
                    "vector not horizontal at the base shape");
      }
      if (centroid_offset(v.vec) > tol.tangent * scale) {
        throw Error(ErrorKind::InvalidTangent, "vector moves the centroid");
      }
      break;
    case ManifoldKind::Spd: {
      const Eigen::MatrixXd m = spd::unflatten(v.vec, id.param);
      if (max_abs(m - m.transpose()) > tol.storage * std::max(1.0, max_abs(m))) {
        throw Error(ErrorKind::InvalidTangent, "matrix is not symmetric");
      }
      break;
    }
  }
}

Point exp(const TangentVector& v, const Tolerances& tol) {
  check_tangent(v, tol);
  return Chart(v.base).exp_point(v.vec);
}

TangentVector log(const Point& p, const Point& q) {
  require_same(p.manifold(), q.manifold());
  return {p, Chart(p).log(q.coords())};
}

double inner(const TangentVector& u, const TangentVector& v) {
  if (!(u.base.manifold() == v.base.manifold()) ||
      u.base.coords() != v.base.coords()) {
    throw Error(ErrorKind::BasePointMismatch, "tangent vectors at different points");
  }
  require_length(u.base.manifold(), u.vec.size());
  require_length(v.base.manifold(), v.vec.size());
  return Chart(u.base).inner(u.vec, v.vec);
}

double norm(const TangentVector& v) {
  require_length(v.base.manifold(), v.vec.size());
  return Chart(v.base).norm(v.vec);
}

TangentVector project_tangent(const Point& p, const Eigen::VectorXd& ambient) {
  return {p, Chart(p).project_tangent(ambient)};
}

Point project_to_manifold(ManifoldId id, const Eigen::VectorXd& a) {
  require_length(id, a.size());
  switch (id.kind) {
    case ManifoldKind::Sphere: {
      const double n = a.norm();
      if (!(n > 0.0)) throw Error(ErrorKind::DegenerateInput, "zero vector");
      return PointAccess::make(id, a / n);
    }
    case ManifoldKind::PlanarShape: {
      try {
        return PointAccess::make(id, shape::to_preshape(a));
      } catch (const Error& e) {
        throw Error(ErrorKind::DegenerateInput, e.what());
      }
    }
    case ManifoldKind::Spd: {
      const Eigen::MatrixXd m = symmetrized(spd::unflatten(a, id.param));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
      if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw Error(ErrorKind::DegenerateInput,
                    "symmetrization is not positive definite");
      }
      return PointAccess::make(id, spd::flatten(m));
    }
  }
  throw Error(ErrorKind::DegenerateInput, "unknown manifold");
}

// ---------------------------------------------------------------------------
// shape

namespace shape {

Eigen::VectorXd quarter_turn(const Eigen::VectorXd& z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i + 1 < z.size(); i += 2) {
    out[i] = z[i + 1];
    out[i + 1] = -z[i];
  }
  return out;
}

std::complex<double> hermitian_inner(const Eigen::VectorXd& p,
                                     const Eigen::VectorXd& q) {
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index i = 0; i + 1 < p.size(); i += 2) {
    // conj(px + i py) * (qx + i qy)
    re += p[i] * q[i] + p[i + 1] * q[i + 1];
    im += p[i] * q[i + 1] - p[i + 1] * q[i];
  }
  return {re, im};
}

Eigen::VectorXd align(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const std::complex<double> h = hermitian_inner(p, q);
  const double r = std::abs(h);
  if (r == 0.0) return q;
  // multiply q by conj(h)/|h| = e^{-i arg h}
  const double c = h.real() / r;
  const double s = -h.imag() / r;
  Eigen::VectorXd out(q.size());
  for (Eigen::Index i = 0; i + 1 < q.size(); i += 2) {
    out[i] = c * q[i] - s * q[i + 1];
    out[i + 1] = s * q[i] + c * q[i + 1];
  }
  return out;
}

Eigen::VectorXd to_preshape(const Eigen::VectorXd& landmarks) {
  if (landmarks.size() % 2 != 0) {
    throw Error(ErrorKind::DimensionMismatch, "odd landmark coordinate count");
  }
  Eigen::VectorXd z = centered(landmarks);
  const double n = z.norm();
  if (!(n > 1e-12 * std::max(1.0, landmarks.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorKind::DegenerateShape, "configuration has zero size");
  }
  z /= n;
  return z;
}

}  // namespace shape

// ---------------------------------------------------------------------------
// spd

namespace spd {

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s) {
  return sym_apply(s, [](double x) { return std::exp(x); });
}

Eigen::MatrixXd sym_log(const Eigen::MatrixXd& s) {
  return sym_apply(s, [](double x) { return std::log(x); });
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& s) {
  return sym_apply(s, [](double x) { return std::sqrt(x); });
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& s) {
  return sym_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int n) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
}

Eigen::VectorXd sym_to_coords(const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  Eigen::VectorXd z(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) z[k++] = s(i, i);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      z[k++] = std::numbers::sqrt2 * 0.5 * (s(i, j) + s(j, i));
    }
  }
  return z;
}

Eigen::MatrixXd coords_to_sym(const Eigen::VectorXd& z, int n) {
  if (z.size() != n * (n + 1) / 2) {
    throw Error(ErrorKind::DimensionMismatch, "wrong symmetric coordinate count");
  }
  Eigen::MatrixXd s(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) s(i, i) = z[k++];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      s(i, j) = s(j, i) = z[k++] / std::numbers::sqrt2;
    }
  }
  return s;
}

}  // namespace spd

}  // namespace mom
