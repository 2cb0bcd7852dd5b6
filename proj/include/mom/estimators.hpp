#pragma once

// Sample Frechet means, geometric medians and the median-of-means estimator.
//
// All estimators are deterministic functions of their input multiset: points
// are put into a canonical (lexicographic) order before any floating-point
// reduction, so permuting the input leaves the output bit-for-bit unchanged.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mom/manifold.hpp"

namespace mom {

struct SolverConfig {
  int max_iterations = 1000;
  double step_tolerance = 1e-10;  // geodesic units
  double step_size = 1.0;         // Weiszfeld damping factor in (0, 1]
  double gradient_step_size = 0.5;  // damping of the gradient-descent mean
  std::uint64_t seed = 0;         // randomized partitioning
  /// When false, running out of iterations returns a report with
  /// `converged == false` instead of throwing NotConverged.
  bool fail_on_nonconvergence = true;

  void validate() const;
};

enum class Warning {
  HemisphereViolation,  // no open hemisphere certified; uniqueness not guaranteed
  AnchorHit,            // a Weiszfeld iterate landed on a data point
  FixedPointStalled,    // sphere fixed point stalled; finished by gradient descent
};

struct EstimatorReport {
  Point estimate;
  int iterations = 0;
  double final_step_norm = 0.0;
  /// Value of the minimized empirical risk at the estimate: mean squared
  /// distance for means, mean distance for medians.
  double objective = 0.0;
  bool converged = true;
  /// Objective at the start point and after every accepted iteration.
  std::vector<double> objective_trace;
  std::vector<Warning> warnings;

  bool has_warning(Warning w) const;
};

struct SubsetPartition {
  /// Disjoint index groups covering 0..n-1, each sorted ascending.
  std::vector<std::vector<std::size_t>> groups;
  std::size_t m = 0;
};

/// Uniformly random split of 0..n-1 into m groups of size floor(n/m) or
/// ceil(n/m) (shuffle, then chunk). Throws InvalidGroupCount unless 1 <= m <= n.
SubsetPartition partition(std::size_t n, std::size_t m, std::uint64_t seed);

/// (1/n) sum d^2(x, p_i)
double frechet_objective(std::span<const Point> points, const Point& x);
/// (1/n) sum rho(x, p_i) with rho the intrinsic or chordal distance.
double median_objective(std::span<const Point> points, const Point& x,
                        MetricKind metric);

/// Fixed-point iteration mu <- Psi(mu) / |Psi(mu)| for the intrinsic mean on
/// the sphere, Psi(x) = sum_i theta_i / sin(theta_i) p_i. If the iteration
/// stalls it is finished by gradient descent (Warning::FixedPointStalled).
EstimatorReport intrinsic_mean_sphere(std::span<const Point> points,
                                      const SolverConfig& config = {});

/// Damped Riemannian gradient descent
/// mu <- exp_mu(gradient_step_size * mean_i log_mu x_i). Works on every
/// manifold; on SPD the limit is the unique Frechet mean.
EstimatorReport intrinsic_mean_gradient(std::span<const Point> points,
                                        const SolverConfig& config = {});

/// Riemannian Weiszfeld iteration (Ostresh's anchor modification) for the
/// intrinsic geometric median.
EstimatorReport intrinsic_median(std::span<const Point> points,
                                 const SolverConfig& config = {});

/// Projection of the Euclidean mean (sphere only). Throws ProjectionUndefined
/// when the Euclidean mean vanishes.
EstimatorReport extrinsic_mean(std::span<const Point> points);

/// Weiszfeld direction projected to the tangent space and exponentiated;
/// minimizes the mean chordal distance over the sphere.
EstimatorReport extrinsic_median(std::span<const Point> points,
                                 const SolverConfig& config = {});

struct MatrixMedianReport {
  Eigen::MatrixXd estimate;
  int iterations = 0;
  double final_step_norm = 0.0;
  double objective = 0.0;  // (1/n) sum |X - A_i|_F
  bool converged = true;
  std::vector<double> objective_trace;
};

/// Classical Weiszfeld iteration in the flat space of matrices under the
/// Frobenius norm.
MatrixMedianReport frobenius_median(std::span<const Eigen::MatrixXd> matrices,
                                    const SolverConfig& config = {});

enum class SubsetEstimator {
  IntrinsicMeanFixedPoint,  // sphere
  IntrinsicMeanGradient,    // any manifold
  ExtrinsicMean,            // sphere
};

/// Default subset estimator for a manifold/metric pair.
SubsetEstimator default_subset_estimator(ManifoldId id, MetricKind metric);

enum class Execution { Serial, Parallel };

struct MomResult {
  EstimatorReport median;               // mu* = med(mu_1, ..., mu_m)
  std::vector<Point> subset_estimates;  // mu_j, in group order
  SubsetPartition partition;            // indices into the caller's input
};

/// Partition, estimate on each group, aggregate by the geometric median in
/// `median_kind`. Failures inside a group are rethrown tagged with the group.
MomResult median_of_means(std::span<const Point> points, std::size_t m,
                          SubsetEstimator subset_estimator,
                          MetricKind median_kind, const SolverConfig& config,
                          Execution execution = Execution::Parallel);

/// Same, over a caller-supplied partition of `points`.
MomResult median_of_means(std::span<const Point> points,
                          const SubsetPartition& groups,
                          SubsetEstimator subset_estimator,
                          MetricKind median_kind, const SolverConfig& config,
                          Execution execution = Execution::Parallel);

/// Runs `estimator` on `points` (a single point is returned as is).
EstimatorReport estimate(std::span<const Point> points, SubsetEstimator estimator,
                         const SolverConfig& config);

/// Canonical order used by all estimators: lexicographic on coordinates.
std::vector<std::size_t> canonical_order(std::span<const Point> points);

}  // namespace mom
