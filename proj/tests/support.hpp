#pragma once

// Hand-rolled random generators shared by the property tests and the
// acceptance suite.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "mom/manifold.hpp"
#include "mom/random.hpp"

namespace mom::testing {

inline Eigen::VectorXd gaussian(Rng& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Point random_point(const ManifoldId& id, Rng& rng) {
  switch (id.kind) {
    case ManifoldKind::Sphere:
      return Point::sphere(gaussian(rng, id.param + 1).normalized());
    case ManifoldKind::PlanarShape:
      return Point::planar_shape(shape::to_preshape(gaussian(rng, 2 * id.param)));
    case ManifoldKind::Spd: {
      const Eigen::MatrixXd a = spd::unflatten(gaussian(rng, id.param * id.param), id.param);
      return Point::spd(spd::sym_exp(0.5 * (a + a.transpose())));
    }
  }
  return Point::sphere(Eigen::Vector3d::UnitX());
}

/// Tangent vector at p with norm exactly `length` (random direction).
inline TangentVector random_tangent(const Point& p, Rng& rng, double length) {
  const auto n = p.coords().size();
  Chart chart(p);
  Eigen::VectorXd v = chart.project_tangent(gaussian(rng, n));
  v *= length / chart.norm(v);
  return {p, v};
}

/// Point at geodesic distance uniform in [0, radius) from p.
inline Point random_near(const Point& p, Rng& rng, double radius) {
  return exp(random_tangent(p, rng, uniform(rng, 0.0, radius)));
}

inline std::vector<ManifoldId> test_manifolds() {
  return {ManifoldId::sphere(2), ManifoldId::sphere(7), ManifoldId::planar_shape(5),
          ManifoldId::spd(3)};
}

}  // namespace mom::testing
