#pragma once

#include "mom/manifold.hpp"

namespace mom {

/// Constants the concentration theory needs for each manifold: the
/// Lipschitz constant of log_p on a geodesic ball around p, that ball's
/// radius, and the injectivity radius.
struct ManifoldSpec {
  ManifoldId id;
  int intrinsic_dim = 0;
  int ambient_dim = 0;
  double log_lipschitz_K = 1.0;
  double log_lipschitz_radius = 0.0;
  double injectivity_radius = 0.0;
};

ManifoldSpec spec_of(ManifoldId id);

struct LipschitzWitness {
  double lhs = 0.0;  // |log_p q1 - log_p q2|
  double rhs = 0.0;  // K d(q1, q2)
};

/// Evaluates both sides of |log_p q1 - log_p q2| <= K d(q1, q2). The left
/// side uses the ambient norm on the sphere and shape space and the metric
/// norm at p on SPD. Throws OutOfBall when q1 or q2 is not strictly inside
/// the ball on which the constant holds.
LipschitzWitness lipschitz_witness(const Point& p, const Point& q1,
                                   const Point& q2);

}  // namespace mom
