#pragma once

// Constants and tail bounds for the geometric median of subset estimators,
// and the geodesic-distance CDF of the von Mises-Fisher distribution.

#include <cstddef>

namespace mom::bounds {

/// Inflation constant for the chordal (embedded) median:
/// (1 - a) / (sqrt(1 - 2a) cos(psi) - a sin(psi)), for a in
/// (0, cot(psi) tan(psi/2)) (a in (0, 1/2) when psi = 0).
/// Throws InadmissibleAlpha outside that range.
double c_alpha_extrinsic(double alpha, double psi_bar);

/// Inflation constant for the intrinsic median with a K-Lipschitz log map:
/// K (1 - a) / sqrt(1 - 2a), a in (0, 1/2).
double c_alpha_intrinsic(double alpha, double lipschitz_K);

/// Upper end of the admissible alpha range for a given worst-case angle.
double max_alpha_extrinsic(double psi_bar);

/// Bernoulli KL divergence (1-a) log((1-a)/(1-e)) + a log(a/e), 0 < e < a < 1.
double phi(double alpha, double eta);

/// exp(-m phi(alpha, eta)).
double theorem_bound(std::size_t m, double alpha, double eta);

/// Chebyshev level (4 / eps^2)(m / n) E rho^2, clamped to <= 1.
double eta_chebyshev_extrinsic(double epsilon, std::size_t m, std::size_t n,
                               double second_moment);

/// Chebyshev level (K^2 / eps^2)(m / n) E d^2, clamped to <= 1.
double eta_chebyshev_intrinsic(double epsilon, std::size_t m, std::size_t n,
                               double lipschitz_K, double second_moment);

/// P(d(x, mu) <= eps) for x ~ vMF(mu, kappa) on S^d, by adaptive
/// Gauss-Kronrod quadrature of e^{kappa cos t} sin^{d-1} t.
double vmf_geodesic_cdf(double epsilon, double kappa, int d);

/// Closed form of the same CDF on S^2 (test cross-check).
double vmf_geodesic_cdf_s2(double epsilon, double kappa);

/// Radius r with vmf_geodesic_cdf(r) = level, by bisection.
double vmf_confidence_radius(double level, double kappa, int d);

}  // namespace mom::bounds
