#include "mom/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "mom/error.hpp"

namespace mom::bounds {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void domain(const std::string& what) {
  throw Error(ErrorKind::DomainError, what);
}

// Unnormalized colatitude density on S^d, scaled by e^{-kappa} so the
// integrand peaks at 1.
double colatitude_mass(double a, double b, double kappa, int d) {
  if (b <= a) return 0.0;
  const auto f = [kappa, d](double t) {
    return std::exp(kappa * (std::cos(t) - 1.0)) * std::pow(std::sin(t), d - 1);
  };
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0;
  return Integrator::integrate(f, a, b, 15, 1e-13, &error);
}

void check_vmf(double kappa, int d) {
  if (!(kappa > 0.0)) domain("kappa must be > 0");
  if (d < 2) domain("sphere dimension must be >= 2");
}

}  // namespace

double max_alpha_extrinsic(double psi_bar) {
  if (!(psi_bar >= 0.0 && psi_bar < kPi / 2)) {
    throw Error(ErrorKind::InadmissibleAlpha, "psi_bar must lie in [0, pi/2)");
  }
  if (psi_bar == 0.0) return 0.5;  // limit of cot(psi) tan(psi/2)
  return std::tan(psi_bar / 2) / std::tan(psi_bar);
}

double c_alpha_extrinsic(double alpha, double psi_bar) {
  const double upper = max_alpha_extrinsic(psi_bar);
  if (!(alpha > 0.0 && alpha < upper)) {
    throw Error(ErrorKind::InadmissibleAlpha,
                "alpha outside (0, " + std::to_string(upper) + ")");
  }
  const double den = std::sqrt(1.0 - 2.0 * alpha) * std::cos(psi_bar) -
                     alpha * std::sin(psi_bar);
  if (!(den > 0.0)) {
    throw Error(ErrorKind::InadmissibleAlpha, "non-positive denominator");
  }
  return (1.0 - alpha) / den;
}

double c_alpha_intrinsic(double alpha, double lipschitz_K) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorKind::InadmissibleAlpha, "alpha outside (0, 1/2)");
  }
  if (!(lipschitz_K >= 1.0)) {
    throw Error(ErrorKind::InadmissibleAlpha, "Lipschitz constant must be >= 1");
  }
  return lipschitz_K * (1.0 - alpha) * std::sqrt(1.0 / (1.0 - 2.0 * alpha));
}

double phi(double alpha, double eta) {
  if (!(eta > 0.0 && eta < alpha && alpha < 1.0)) {
    domain("phi needs 0 < eta < alpha < 1");
  }
  return (1.0 - alpha) * std::log((1.0 - alpha) / (1.0 - eta)) +
         alpha * std::log(alpha / eta);
}

double theorem_bound(std::size_t m, double alpha, double eta) {
  if (m < 1) domain("m must be >= 1");
  return std::exp(-static_cast<double>(m) * phi(alpha, eta));
}

double eta_chebyshev_intrinsic(double epsilon, std::size_t m, std::size_t n,
                               double lipschitz_K, double second_moment) {
  if (!(epsilon > 0.0)) domain("epsilon must be > 0");
  if (m < 1 || m > n) domain("need 1 <= m <= n");
  if (!(second_moment >= 0.0)) domain("second moment must be >= 0");
  const double eta = lipschitz_K * lipschitz_K / (epsilon * epsilon) *
                     (static_cast<double>(m) / static_cast<double>(n)) *
                     second_moment;
  return std::min(eta, 1.0);
}

double eta_chebyshev_extrinsic(double epsilon, std::size_t m, std::size_t n,
                               double second_moment) {
  return eta_chebyshev_intrinsic(epsilon, m, n, 2.0, second_moment);
}

double vmf_geodesic_cdf(double epsilon, double kappa, int d) {
  check_vmf(kappa, d);
  if (!(epsilon >= 0.0 && epsilon <= kPi)) domain("epsilon must lie in [0, pi]");
  if (epsilon == 0.0) return 0.0;
  if (epsilon == kPi) return 1.0;
  const double inside = colatitude_mass(0.0, epsilon, kappa, d);
  const double outside = colatitude_mass(epsilon, kPi, kappa, d);
  return inside / (inside + outside);
}

double vmf_geodesic_cdf_s2(double epsilon, double kappa) {
  // (e^k - e^{k cos eps}) / (e^k - e^{-k}), rescaled by e^{-k}
  return -std::expm1(kappa * (std::cos(epsilon) - 1.0)) /
         -std::expm1(-2.0 * kappa);
}

double vmf_confidence_radius(double level, double kappa, int d) {
  check_vmf(kappa, d);
  if (!(level > 0.0 && level < 1.0)) domain("level must lie in (0, 1)");
  const auto f = [&](double r) { return vmf_geodesic_cdf(r, kappa, d) - level; };
  const auto done = [](double a, double b) { return b - a < 1e-13; };
  const auto [lo, hi] = boost::math::tools::bisect(f, 0.0, kPi, done);
  return 0.5 * (lo + hi);
}

}  // namespace mom::bounds
