#pragma once

// Geometry of the three manifolds the estimators run on: the unit sphere
// S^d, Kendall's planar shape space of K landmarks, and SPD(n) with the
// affine-invariant (Fisher-Rao) metric.
//
// Points are stored by their ambient coordinates:
//   Sphere(d)       unit vector in R^{d+1}
//   PlanarShape(K)  centered unit-norm preshape, interleaved x1,y1,...,xK,yK
//   SPD(n)          n x n symmetric positive definite, column-major n*n
//
// Shape-space points are fixed representatives of their rotation orbit.
// Operations that need two shapes rotate the second one onto the first
// (optimal unit complex factor), which turns every quotient computation into
// a preshape-sphere computation on aligned representatives.

#include <Eigen/Dense>

#include <complex>
#include <string>

#include "mom/error.hpp"

namespace mom {

enum class ManifoldKind { Sphere, PlanarShape, Spd };

enum class MetricKind { Intrinsic, Extrinsic };

std::string to_string(MetricKind metric);
MetricKind parse_metric(const std::string& text);

struct ManifoldId {
  ManifoldKind kind = ManifoldKind::Sphere;
  /// d for Sphere(d), K for PlanarShape(K), n for SPD(n).
  int param = 2;

  static ManifoldId sphere(int d);
  static ManifoldId planar_shape(int landmarks);
  static ManifoldId spd(int n);

  int ambient_dim() const;
  std::string name() const;

  friend bool operator==(const ManifoldId&, const ManifoldId&) = default;
};

struct Tolerances {
  double storage = 1e-12;  // unit norm, centering, symmetry of stored points
  double tangent = 1e-10;  // orthogonality of tangent vectors
};

class Point {
 public:
  /// Validates the storage invariants of `id`; throws InvalidPoint.
  static Point from_ambient(ManifoldId id, Eigen::VectorXd coords,
                            const Tolerances& tol = {});
  static Point sphere(const Eigen::VectorXd& unit_vector);
  static Point planar_shape(const Eigen::VectorXd& preshape);
  static Point spd(const Eigen::MatrixXd& matrix);

  const ManifoldId& manifold() const noexcept { return id_; }
  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  /// SPD view of the coordinates.
  Eigen::Map<const Eigen::MatrixXd> matrix() const;

 private:
  friend struct PointAccess;
  Point(ManifoldId id, Eigen::VectorXd coords)
      : id_(id), coords_(std::move(coords)) {}

  ManifoldId id_;
  Eigen::VectorXd coords_;
};

/// Library-internal construction without validation. Callers guarantee the
/// storage invariants (they come out of exp, projection or normalization).
struct PointAccess {
  static Point make(ManifoldId id, Eigen::VectorXd coords) {
    return Point(id, std::move(coords));
  }
};

struct TangentVector {
  Point base;
  Eigen::VectorXd vec;  // ambient representation, same length as base.coords()
};

double distance(const Point& p, const Point& q,
                MetricKind metric = MetricKind::Intrinsic);
Point exp(const TangentVector& v, const Tolerances& tol = {});
TangentVector log(const Point& p, const Point& q);
double inner(const TangentVector& u, const TangentVector& v);
double norm(const TangentVector& v);
TangentVector project_tangent(const Point& p, const Eigen::VectorXd& ambient);
Point project_to_manifold(ManifoldId id, const Eigen::VectorXd& ambient);

/// Throws InvalidTangent when `v` fails the tangency invariants at its base.
void check_tangent(const TangentVector& v, const Tolerances& tol = {});

/// Local computations at one fixed base point. On SPD the square root and
/// inverse square root of the base are factored once, so estimators build a
/// chart per iterate and evaluate all data points through it.
class Chart {
 public:
  explicit Chart(Point base);

  const Point& base() const noexcept { return base_; }
  const ManifoldId& manifold() const noexcept { return base_.manifold(); }

  /// Ambient tangent coordinates of log_base(q). Throws CutLocus.
  Eigen::VectorXd log(const Eigen::VectorXd& q) const;
  Eigen::VectorXd exp(const Eigen::VectorXd& v) const;
  Point exp_point(const Eigen::VectorXd& v) const;
  double distance(const Eigen::VectorXd& q) const;
  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  double norm(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project_tangent(const Eigen::VectorXd& ambient) const;

  /// SPD only: base^{1/2} and base^{-1/2}.
  const Eigen::MatrixXd& sqrt_base() const noexcept { return sqrt_; }
  const Eigen::MatrixXd& inv_sqrt_base() const noexcept { return inv_sqrt_; }

 private:
  Point base_;
  Eigen::MatrixXd sqrt_;
  Eigen::MatrixXd inv_sqrt_;
};

namespace shape {

/// Landmark-wise rotation by a quarter turn: (x, y) -> (y, -x).
Eigen::VectorXd quarter_turn(const Eigen::VectorXd& z);
/// sum_k conj(p_k) q_k with landmarks read as complex numbers.
std::complex<double> hermitian_inner(const Eigen::VectorXd& p,
                                     const Eigen::VectorXd& q);
/// q multiplied by the unit complex factor that brings it closest to p.
Eigen::VectorXd align(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
/// Remove translation and scale. Throws DegenerateShape for a zero-size input.
Eigen::VectorXd to_preshape(const Eigen::VectorXd& landmarks);

}  // namespace shape

namespace spd {

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s);
Eigen::MatrixXd sym_log(const Eigen::MatrixXd& s);
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& s);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& s);
Eigen::VectorXd flatten(const Eigen::MatrixXd& m);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int n);

/// Isometric coordinates of a symmetric matrix: the diagonal, then the upper
/// off-diagonal entries row by row scaled by sqrt(2), so the Euclidean norm of
/// the coordinates equals the Frobenius norm of the matrix.
Eigen::VectorXd sym_to_coords(const Eigen::MatrixXd& s);
Eigen::MatrixXd coords_to_sym(const Eigen::VectorXd& z, int n);

}  // namespace spd

}  // namespace mom
