#include "mom/pga.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace mom {

namespace {

constexpr double kDegenerateEigenvalue = 1e-14;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Orthonormal basis of the orthogonal complement of span(cols) in R^rows.
Eigen::MatrixXd complement(const Eigen::MatrixXd& cols) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(cols.rows() - cols.cols());
}

Eigen::MatrixXd covariance(const std::vector<Eigen::VectorXd>& coords) {
  const auto dim = coords.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& c : coords) mean += c;
  mean /= static_cast<double>(coords.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& c : coords) {
    const Eigen::VectorXd d = c - mean;
    cov.noalias() += d * d.transpose();
  }
  return symmetrized(cov / static_cast<double>(coords.size()));
}

TangentBasis basis_from_covariance(const TangentCoordinates& tc,
                                   const Eigen::MatrixXd& cov, int num_directions) {
  if (num_directions < 1 || num_directions > tc.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "number of directions must lie in [1, intrinsic dimension]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const auto dim = cov.rows();
  TangentBasis out{tc.center(), {}, Eigen::VectorXd(num_directions),
                   Eigen::MatrixXd(dim, num_directions), tc.mode(), false};
  for (int i = 0; i < num_directions; ++i) {
    // Eigen sorts ascending; flip, and fix the sign by the largest entry.
    const Eigen::Index col = dim - 1 - i;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.eigenvalues[i] = eig.eigenvalues()[col];
    out.axes.col(i) = v;
    out.directions.push_back({tc.center(), tc.ambient(v)});
  }
  out.degenerate_covariance = eig.eigenvalues().minCoeff() < kDegenerateEigenvalue;
  return out;
}

// d^2(exp_center(sum a_i axis_i), x) with the SPD congruence factored out.
class ResidualObjective {
 public:
  ResidualObjective(const TangentBasis& basis, int k, const Point& x)
      : tc_(basis.center, basis.mode), axes_(basis.axes.leftCols(k)), x_(x) {
    if (x.manifold().kind == ManifoldKind::Spd) {
      const Eigen::MatrixXd& s = tc_.chart().inv_sqrt_base();
      whitened_x_ = symmetrized(s * x.matrix() * s);
    }
  }

  double operator()(const Eigen::VectorXd& a) const {
    const Eigen::VectorXd z = axes_ * a;
    if (x_.manifold().kind != ManifoldKind::Spd) {
      const double d = distance(tc_.exp(z), x_);
      return d * d;
    }
    // d(c^{1/2} e^S c^{1/2}, x) = |log(e^{-S/2} c^{-1/2} x c^{-1/2} e^{-S/2})|_F
    const Eigen::MatrixXd half = spd::sym_exp(-0.5 * tc_.whitened_matrix(z));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        symmetrized(half * whitened_x_ * half), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().array().log().square().sum();
  }

  Point point(const Eigen::VectorXd& a) const { return tc_.exp(axes_ * a); }

  Eigen::VectorXd linearized(const Eigen::VectorXd& full) const {
    return axes_.transpose() * full;
  }

  const TangentCoordinates& coords() const { return tc_; }

 private:
  TangentCoordinates tc_;
  Eigen::MatrixXd axes_;
  const Point& x_;
  Eigen::MatrixXd whitened_x_;
};

Eigen::VectorXd central_gradient(const ResidualObjective& f, const Eigen::VectorXd& a,
                                 double h) {
  Eigen::VectorXd g(a.size());
  Eigen::VectorXd probe = a;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    probe[i] = a[i] + h;
    const double up = f(probe);
    probe[i] = a[i] - h;
    const double down = f(probe);
    probe[i] = a[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// TangentCoordinates

TangentCoordinates::TangentCoordinates(Point center, CoordinateMode mode)
    : chart_(std::move(center)), mode_(mode) {
  const Eigen::VectorXd& p = chart_.base().coords();
  switch (chart_.manifold().kind) {
    case ManifoldKind::Sphere:
      frame_ = complement(p);
      break;
    case ManifoldKind::PlanarShape: {
      const auto n = p.size();
      Eigen::MatrixXd span = Eigen::MatrixXd::Zero(n, 4);
      for (Eigen::Index i = 0; i < n; i += 2) {
        span(i, 0) = 1.0;
        span(i + 1, 1) = 1.0;
      }
      span.col(2) = p;
      span.col(3) = shape::quarter_turn(p);
      frame_ = complement(span);
      break;
    }
    case ManifoldKind::Spd: {
      const int n = chart_.manifold().param;
      dim_ = n * (n + 1) / 2;
      return;
    }
  }
  dim_ = static_cast<int>(frame_.cols());
}

Eigen::VectorXd TangentCoordinates::coordinates(const Point& x) const {
  if (!(x.manifold() == chart_.manifold())) {
    throw Error(ErrorKind::ManifoldMismatch, "point and center differ in manifold");
  }
  if (chart_.manifold().kind != ManifoldKind::Spd) {
    return frame_.transpose() * chart_.log(x.coords());
  }
  const Eigen::MatrixXd& s = chart_.inv_sqrt_base();
  const Eigen::MatrixXd whitened = spd::sym_log(symmetrized(s * x.matrix() * s));
  if (mode_ == CoordinateMode::Whitened) return spd::sym_to_coords(whitened);
  const Eigen::MatrixXd& r = chart_.sqrt_base();
  return spd::sym_to_coords(symmetrized(r * whitened * r));
}

Eigen::VectorXd TangentCoordinates::ambient(const Eigen::VectorXd& a) const {
  if (a.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "coordinate vector has wrong length");
  }
  if (chart_.manifold().kind != ManifoldKind::Spd) return frame_ * a;
  const int n = chart_.manifold().param;
  if (mode_ == CoordinateMode::Raw) return spd::flatten(spd::coords_to_sym(a, n));
  const Eigen::MatrixXd& r = chart_.sqrt_base();
  return spd::flatten(symmetrized(r * spd::coords_to_sym(a, n) * r));
}

Eigen::MatrixXd TangentCoordinates::whitened_matrix(const Eigen::VectorXd& a) const {
  if (chart_.manifold().kind != ManifoldKind::Spd) {
    throw Error(ErrorKind::ManifoldMismatch, "whitened matrices exist on SPD only");
  }
  const int n = chart_.manifold().param;
  const Eigen::MatrixXd s = spd::coords_to_sym(a, n);
  if (mode_ == CoordinateMode::Whitened) return s;
  const Eigen::MatrixXd& w = chart_.inv_sqrt_base();
  return symmetrized(w * s * w);
}

Point TangentCoordinates::exp(const Eigen::VectorXd& a) const {
  return chart_.exp_point(ambient(a));
}

Eigen::VectorXd tangent_coordinates(const Point& center, const Point& x,
                                    CoordinateMode mode) {
  return TangentCoordinates(center, mode).coordinates(x);
}

// ---------------------------------------------------------------------------
// PGA / RPGA

TangentBasis pga(std::span<const Point> points, const Point& center,
                 int num_directions, CoordinateMode mode) {
  if (points.empty()) throw Error(ErrorKind::DegenerateInput, "empty sample");
  const TangentCoordinates tc(center, mode);
  std::vector<Eigen::VectorXd> coords;
  coords.reserve(points.size());
  for (const Point& p : points) coords.push_back(tc.coordinates(p));
  return basis_from_covariance(tc, covariance(coords), num_directions);
}

TangentBasis rpga(std::span<const Point> points, std::size_t m, int num_directions,
                  const RpgaConfig& config) {
  if (points.empty()) throw Error(ErrorKind::DegenerateInput, "empty sample");
  if (m < 1 || m > points.size()) {
    throw Error(ErrorKind::InvalidGroupCount, "need 1 <= m <= n");
  }
  if (points.size() / m < 2) {
    throw Error(ErrorKind::GroupTooSmall,
                "covariance groups need at least 2 points each");
  }
  const MomResult mom = median_of_means(points, m, config.subset_estimator,
                                        config.median_kind, config.solver,
                                        config.execution);
  const TangentCoordinates tc(mom.median.estimate, config.mode);

  const auto& groups = mom.partition.groups;
  std::vector<Eigen::MatrixXd> covs(groups.size());
  std::vector<std::exception_ptr> errors(groups.size());
  const bool parallel = config.execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(groups.size()); ++j) {
    try {
      std::vector<Eigen::VectorXd> coords;
      for (std::size_t i : groups[j]) coords.push_back(tc.coordinates(points[i]));
      covs[j] = covariance(coords);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (std::size_t j = 0; j < errors.size(); ++j) {
    if (!errors[j]) continue;
    try {
      std::rethrow_exception(errors[j]);
    } catch (const Error& e) {
      throw Error(e.kind(), "group " + std::to_string(j) + ": " + e.what(),
                  static_cast<int>(j));
    }
  }

  const MatrixMedianReport med = frobenius_median(covs, config.solver);
  return basis_from_covariance(tc, symmetrized(med.estimate), num_directions);
}

// ---------------------------------------------------------------------------
// Projection and residuals

Projection project_to_submanifold(const TangentBasis& basis, int k, const Point& x,
                                  const ProjectionConfig& config) {
  if (k < 1 || k > basis.axes.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "k must lie in [1, number of directions]");
  }
  const ResidualObjective f(basis, k, x);
  const double h = config.finite_difference_step;

  // Start at the better of the linearized projection and the center.
  Eigen::VectorXd a = f.linearized(f.coords().coordinates(x));
  double fa = f(a);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(k);
  if (const double f0 = f(zero); f0 < fa) {
    a = zero;
    fa = f0;
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd g = central_gradient(f, a, h);
  Projection out{f.point(a), a, 0.0, 0, false};
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (g.norm() < config.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double t = 1.0;
    Eigen::VectorXd next;
    double fnext = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int back = 0; back < 50; ++back, t *= 0.5) {
      next = a + t * dir;
      fnext = f(next);
      if (fnext <= fa + 1e-4 * t * dir.dot(g)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent left at finite-difference resolution.
      out.converged = g.norm() < std::sqrt(config.gradient_tolerance);
      break;
    }
    const Eigen::VectorXd gnext = central_gradient(f, next, h);
    const Eigen::VectorXd s = next - a;
    const Eigen::VectorXd y = gnext - g;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    a = next;
    fa = fnext;
    g = gnext;
    if (s.norm() < 1e-14) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.point = f.point(a);
  out.coefficients = a;
  out.residual = std::sqrt(std::max(fa, 0.0));
  out.iterations = it;
  return out;
}

double mssr(std::span<const Point> points, const TangentBasis& basis, int k,
            const ProjectionConfig& config, Execution execution) {
  if (points.empty()) throw Error(ErrorKind::DegenerateInput, "empty sample");
  std::vector<double> sq(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  const bool parallel = execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.size()); ++i) {
    try {
      const double r = project_to_submanifold(basis, k, points[i], config).residual;
      sq[i] = r * r;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double total = 0.0;
  for (double v : sq) total += v;
  return total / static_cast<double>(points.size());
}

SubmanifoldFit fit_submanifold(std::span<const Point> points, TangentBasis basis, int k,
                               const ProjectionConfig& config, Execution execution) {
  const double value = mssr(points, basis, k, config, execution);
  return {std::move(basis), k, value};
}

}  // namespace mom
