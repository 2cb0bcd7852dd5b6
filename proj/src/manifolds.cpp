#include "mom/manifolds.hpp"

#include <limits>
#include <numbers>

namespace mom {

ManifoldSpec spec_of(ManifoldId id) {
  constexpr double pi = std::numbers::pi;
  constexpr double inf = std::numeric_limits<double>::infinity();
  ManifoldSpec s;
  s.id = id;
  s.ambient_dim = id.ambient_dim();
  switch (id.kind) {
    case ManifoldKind::Sphere:
      s.intrinsic_dim = id.param;
      s.log_lipschitz_K = 2.0;
      s.log_lipschitz_radius = pi / 2;
      s.injectivity_radius = pi;
      break;
    case ManifoldKind::PlanarShape:
      // preshape sphere S^{2K-3} minus the rotation circle
      s.intrinsic_dim = 2 * id.param - 4;
      s.log_lipschitz_K = 2.0;
      s.log_lipschitz_radius = pi / 4;
      s.injectivity_radius = pi / 2;
      break;
    case ManifoldKind::Spd:
      s.intrinsic_dim = id.param * (id.param + 1) / 2;
      s.log_lipschitz_K = 1.0;
      s.log_lipschitz_radius = inf;
      s.injectivity_radius = inf;
      break;
  }
  return s;
}

LipschitzWitness lipschitz_witness(const Point& p, const Point& q1,
                                   const Point& q2) {
  const ManifoldSpec spec = spec_of(p.manifold());
  const Chart chart(p);
  for (const Point* q : {&q1, &q2}) {
    if (!(q->manifold() == p.manifold())) {
      throw Error(ErrorKind::ManifoldMismatch, "witness points differ in manifold");
    }
    if (!(chart.distance(q->coords()) < spec.log_lipschitz_radius)) {
      throw Error(ErrorKind::OutOfBall,
                  "point outside the Lipschitz ball of " + p.manifold().name());
    }
  }
  const Eigen::VectorXd diff = chart.log(q1.coords()) - chart.log(q2.coords());
  LipschitzWitness w;
  w.lhs = chart.norm(diff);
  w.rhs = spec.log_lipschitz_K * distance(q1, q2);
  return w;
}

}  // namespace mom
