#pragma once

// Principal geodesic analysis in tangent coordinates at a center, its
// median-of-means variant, and residuals of data to the fitted geodesic
// submanifolds.

#include <span>
#include <vector>

#include "mom/estimators.hpp"
#include "mom/manifold.hpp"

namespace mom {

enum class CoordinateMode {
  /// Orthonormal for the Riemannian metric at the center. On SPD: the
  /// isometric coordinates of center^{-1/2} Log_center(x) center^{-1/2}.
  Whitened,
  /// SPD only: isometric coordinates of Log_center(x) itself, without the
  /// congruence. Not orthonormal for the metric unless the center is I.
  Raw,
};

/// Coordinates of the tangent space at a fixed center. Sphere and shape use
/// an orthonormal frame of the (horizontal) tangent space; their length is the
/// intrinsic dimension.
class TangentCoordinates {
 public:
  explicit TangentCoordinates(Point center, CoordinateMode mode = CoordinateMode::Whitened);

  const Point& center() const noexcept { return chart_.base(); }
  const Chart& chart() const noexcept { return chart_; }
  CoordinateMode mode() const noexcept { return mode_; }
  int dim() const noexcept { return dim_; }

  /// Coordinates of log_center(x). Throws CutLocus.
  Eigen::VectorXd coordinates(const Point& x) const;
  /// Ambient tangent vector with coordinates `a`.
  Eigen::VectorXd ambient(const Eigen::VectorXd& a) const;
  Point exp(const Eigen::VectorXd& a) const;

  /// SPD only: the symmetric matrix S with exp_center(ambient(a)) =
  /// center^{1/2} e^S center^{1/2}.
  Eigen::MatrixXd whitened_matrix(const Eigen::VectorXd& a) const;

 private:
  Chart chart_;
  CoordinateMode mode_;
  int dim_ = 0;
  Eigen::MatrixXd frame_;  // sphere/shape: orthonormal columns spanning T_center
};

Eigen::VectorXd tangent_coordinates(const Point& center, const Point& x,
                                    CoordinateMode mode = CoordinateMode::Whitened);

struct TangentBasis {
  Point center;
  std::vector<TangentVector> directions;  // ambient, in eigenvalue order
  Eigen::VectorXd eigenvalues;            // nonincreasing
  Eigen::MatrixXd axes;                   // the directions as coordinate columns
  CoordinateMode mode = CoordinateMode::Whitened;
  /// Trailing eigenvalues below 1e-14; directions are still returned.
  bool degenerate_covariance = false;
};

/// Eigenvectors of the 1/n sample covariance of the tangent coordinates of
/// `points` at `center`.
TangentBasis pga(std::span<const Point> points, const Point& center,
                 int num_directions, CoordinateMode mode = CoordinateMode::Whitened);

struct RpgaConfig {
  SolverConfig solver;  // solver.seed fixes the partition
  SubsetEstimator subset_estimator = SubsetEstimator::IntrinsicMeanGradient;
  MetricKind median_kind = MetricKind::Intrinsic;
  CoordinateMode mode = CoordinateMode::Whitened;
  Execution execution = Execution::Parallel;
};

/// Robust PGA: center at the median-of-means estimate, then take the
/// Frobenius geometric median of the per-group covariances (same partition,
/// 1/|U_j| normalization). Throws GroupTooSmall if a group has fewer than 2
/// points.
TangentBasis rpga(std::span<const Point> points, std::size_t m, int num_directions,
                  const RpgaConfig& config = {});

struct ProjectionConfig {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double finite_difference_step = 1e-6;
};

struct Projection {
  Point point;
  Eigen::VectorXd coefficients;
  double residual = 0.0;  // geodesic distance from x to `point`
  int iterations = 0;
  bool converged = true;
};

/// Closest point to x on exp_center(span(first k directions)), by BFGS over
/// the k coefficients with central-difference gradients.
Projection project_to_submanifold(const TangentBasis& basis, int k, const Point& x,
                                  const ProjectionConfig& config = {});

/// (1/n) sum_i residual_i^2 of `points` against the first k directions.
double mssr(std::span<const Point> points, const TangentBasis& basis, int k,
            const ProjectionConfig& config = {},
            Execution execution = Execution::Parallel);

struct SubmanifoldFit {
  TangentBasis basis;
  int k = 1;
  double mssr = 0.0;
};

SubmanifoldFit fit_submanifold(std::span<const Point> points, TangentBasis basis, int k,
                               const ProjectionConfig& config = {},
                               Execution execution = Execution::Parallel);

}  // namespace mom
