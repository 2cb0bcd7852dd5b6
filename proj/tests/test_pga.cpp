#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mom/pga.hpp"
#include "mom/samplers.hpp"
#include "support.hpp"

using namespace mom;

namespace {

Point identity3() { return Point::spd(Eigen::Matrix3d::Identity()); }

std::vector<Point> lognormal(int n, std::uint64_t seed, double kappa = 0.05) {
  SpdLogNormalParams p;
  p.kappa = kappa;
  p.sigma = Eigen::VectorXd::LinSpaced(6, 1.0, 20.0).asDiagonal();
  return sample_spd_lognormal(p, n, seed);
}

// Brute-force covariance of the whitened log coordinates, written out with
// explicit matrix square roots.
Eigen::MatrixXd brute_covariance(const std::vector<Point>& pts, const Point& center) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(center.matrix());
  const Eigen::MatrixXd w = e.operatorInverseSqrt();
  std::vector<Eigen::VectorXd> zs;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
  for (const Point& p : pts) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> f(w * p.matrix() * w);
    const Eigen::MatrixXd l = f.eigenvectors() *
                              f.eigenvalues().array().log().matrix().asDiagonal() *
                              f.eigenvectors().transpose();
    Eigen::VectorXd z(6);
    z << l(0, 0), l(1, 1), l(2, 2), std::sqrt(2.0) * l(0, 1), std::sqrt(2.0) * l(0, 2),
        std::sqrt(2.0) * l(1, 2);
    zs.push_back(z);
    mean += z;
  }
  mean /= static_cast<double>(pts.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(6, 6);
  for (const auto& z : zs) cov += (z - mean) * (z - mean).transpose();
  return cov / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("tangent coordinates") {
  const Point id = identity3();
  CHECK(tangent_coordinates(id, id).norm() == 0.0);
  const Point x = Point::spd(Eigen::Vector3d(std::numbers::e, 1, 1).asDiagonal().toDenseMatrix());
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
  expected[0] = 1.0;
  CHECK((tangent_coordinates(id, x) - expected).norm() < 1e-14);

  Rng rng = make_rng(3);
  for (const ManifoldId& m : mom::testing::test_manifolds()) {
    for (int t = 0; t < 50; ++t) {
      const Point c = mom::testing::random_point(m, rng);
      const Point q = mom::testing::random_near(c, rng, 1.2);
      const TangentCoordinates tc(c);
      const Eigen::VectorXd a = tc.coordinates(q);
      CHECK(a.size() == (m.kind == ManifoldKind::PlanarShape ? 2 * m.param - 4
                         : m.kind == ManifoldKind::Sphere    ? m.param
                                                             : 6));
      CHECK(std::abs(a.norm() - distance(c, q)) < 1e-9);
      CHECK(distance(tc.exp(a), q) < 1e-8);
    }
  }
  // Raw coordinates coincide with whitened ones at the identity only.
  const Point c = Point::spd(Eigen::Vector3d(4, 1, 1).asDiagonal().toDenseMatrix());
  const Point q = mom::testing::random_point(ManifoldId::spd(3), rng);
  CHECK((tangent_coordinates(id, q, CoordinateMode::Raw) - tangent_coordinates(id, q)).norm() <
        1e-12);
  CHECK((tangent_coordinates(c, q, CoordinateMode::Raw) - tangent_coordinates(c, q)).norm() >
        1e-3);
  const TangentCoordinates raw(c, CoordinateMode::Raw);
  CHECK(distance(raw.exp(raw.coordinates(q)), q) < 1e-9);
}

TEST_CASE("pga basics") {
  const Point id = identity3();
  const std::vector<Point> same(5, id);
  const TangentBasis zero = pga(same, id, 3);
  CHECK(zero.degenerate_covariance);
  CHECK(zero.eigenvalues.cwiseAbs().maxCoeff() == 0.0);

  // Rank one: exp_c(t v).
  Rng rng = make_rng(8);
  const Point c = mom::testing::random_point(ManifoldId::spd(3), rng);
  const TangentCoordinates tc(c);
  Eigen::VectorXd v = mom::testing::gaussian(rng, 6).normalized();
  std::vector<Point> line;
  std::vector<double> ts{-0.8, -0.3, 0.1, 0.4, 0.9, 1.3};
  for (double t : ts) line.push_back(tc.exp(t * v));
  const TangentBasis b = pga(line, c, 2);
  CHECK(std::abs(std::abs(b.axes.col(0).dot(v)) - 1.0) < 1e-10);
  double mean = 0, var = 0;
  for (double t : ts) mean += t / 6;
  for (double t : ts) var += (t - mean) * (t - mean) / 6;
  CHECK(b.eigenvalues[0] == doctest::Approx(var).epsilon(1e-10));
  CHECK(b.degenerate_covariance);

  const auto pts = lognormal(20, 11);
  const Point center = intrinsic_mean_gradient(pts).estimate;
  const TangentBasis full = pga(pts, center, 6);
  const Eigen::MatrixXd cov = brute_covariance(pts, center);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(cov);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(std::abs(full.axes.col(i).dot(e.eigenvectors().col(5 - i))) - 1.0) < 1e-8);
    CHECK(full.eigenvalues[i] == doctest::Approx(e.eigenvalues()[5 - i]).epsilon(1e-10));
    if (i > 0) CHECK(full.eigenvalues[i] <= full.eigenvalues[i - 1]);
  }
  CHECK((full.axes.transpose() * full.axes - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-10);
  CHECK(full.eigenvalues.sum() == doctest::Approx(cov.trace()).epsilon(1e-10));
  // Directions are orthonormal for the metric at the center.
  Chart chart(center);
  for (int i = 0; i < 6; ++i) {
    CHECK(chart.norm(full.directions[i].vec) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("pga is rotation equivariant on the sphere") {
  Rng rng = make_rng(44);
  const Point mu = mom::testing::random_point(ManifoldId::sphere(4), rng);
  auto pts = sample_vmf({mu, 10.0}, 40, 1);
  const Point c = intrinsic_mean_sphere(pts).estimate;
  const TangentBasis b = pga(pts, c, 2);

  const Eigen::MatrixXd r =
      Eigen::HouseholderQR<Eigen::MatrixXd>(mom::testing::gaussian(rng, 25).reshaped(5, 5))
          .householderQ();
  std::vector<Point> rotated;
  for (const Point& p : pts) rotated.push_back(Point::sphere((r * p.coords()).normalized()));
  const Point rc = intrinsic_mean_sphere(rotated).estimate;
  CHECK((rc.coords() - r * c.coords()).norm() < 1e-8);
  const TangentBasis rb = pga(rotated, rc, 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(std::abs(rb.directions[i].vec.dot(r * b.directions[i].vec)) - 1.0) < 1e-8);
  }
}

TEST_CASE("rpga") {
  const auto pts = lognormal(30, 5);
  RpgaConfig cfg;
  cfg.solver.seed = 3;
  const TangentBasis one = rpga(pts, 1, 3, cfg);
  const TangentBasis ref = pga(pts, intrinsic_mean_gradient(pts).estimate, 3);
  CHECK(one.center.coords() == ref.center.coords());
  CHECK((one.axes - ref.axes).norm() < 1e-12);
  CHECK((one.eigenvalues - ref.eigenvalues).norm() < 1e-14);

  const std::vector<Point> same(8, identity3());
  const TangentBasis flat = rpga(same, 4, 2, cfg);
  CHECK(distance(flat.center, identity3()) < 1e-14);
  CHECK(flat.eigenvalues.cwiseAbs().maxCoeff() < 1e-14);

  try {
    rpga(pts, 16, 3, cfg);
    FAIL("expected GroupTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GroupTooSmall);
  }

  cfg.execution = Execution::Serial;
  const TangentBasis s = rpga(pts, 10, 3, cfg);
  cfg.execution = Execution::Parallel;
  const TangentBasis p = rpga(pts, 10, 3, cfg);
  CHECK(s.axes == p.axes);
  CHECK(s.center.coords() == p.center.coords());
}

TEST_CASE("projection to geodesic submanifolds") {
  const auto pts = lognormal(30, 6, 0.1);
  const Point center = intrinsic_mean_gradient(pts).estimate;
  const TangentBasis b = pga(pts, center, 3);

  const Projection at_center = project_to_submanifold(b, 2, center);
  CHECK(at_center.residual < 1e-12);
  CHECK(at_center.coefficients.norm() < 1e-12);

  const TangentCoordinates tc(center);
  const Point on = tc.exp(0.7 * b.axes.col(0));
  const Projection p1 = project_to_submanifold(b, 3, on);
  CHECK(p1.residual <= 1e-8);
  CHECK(p1.coefficients[0] == doctest::Approx(0.7).epsilon(1e-7));

  for (const Point& x : pts) {
    const Projection p = project_to_submanifold(b, 1, x);
    CHECK(p.converged);
    const Eigen::VectorXd lin = b.axes.leftCols(1).transpose() * tc.coordinates(x);
    CHECK(p.residual <= distance(tc.exp(b.axes.leftCols(1) * lin), x) + 1e-12);
    CHECK(p.residual <= distance(center, x) + 1e-9);
    CHECK(distance(p.point, x) == doctest::Approx(p.residual).epsilon(1e-8));
  }
}

TEST_CASE("mssr") {
  const auto pts = lognormal(40, 7, 0.1);
  const Point center = intrinsic_mean_gradient(pts).estimate;
  const TangentBasis b = pga(pts, center, 6);
  double prev = 1e300;
  for (int k = 1; k <= 6; ++k) {
    const double v = mssr(pts, b, k);
    CHECK(v <= prev + 1e-8);
    prev = v;
  }
  CHECK(prev < 1e-12);

  const TangentCoordinates tc(center);
  std::vector<Point> on;
  for (int i = 0; i < 5; ++i) on.push_back(tc.exp((0.2 * i - 0.4) * b.axes.col(1)));
  CHECK(mssr(on, b, 2) < 1e-12);
  CHECK(mssr(pts, b, 3, {}, Execution::Serial) == mssr(pts, b, 3, {}, Execution::Parallel));
  CHECK(fit_submanifold(pts, b, 2).mssr == mssr(pts, b, 2));
}
