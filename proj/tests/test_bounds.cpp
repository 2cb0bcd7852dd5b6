#include <doctest.h>

#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>

#include "mom/bounds.hpp"
#include "mom/error.hpp"

using namespace mom;
using namespace mom::bounds;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::ConfigError;
}

struct VmfIntegrand {
  double kappa;
  int d;
};

double vmf_integrand(double t, void* params) {
  const auto* p = static_cast<VmfIntegrand*>(params);
  return std::exp(p->kappa * (std::cos(t) - 1.0)) * std::pow(std::sin(t), p->d - 1);
}

// Independent quadrature (GSL QAGS) of the same ratio.
double gsl_cdf(double eps, double kappa, int d) {
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(1000);
  VmfIntegrand params{kappa, d};
  gsl_function f{&vmf_integrand, &params};
  double inside = 0, outside = 0, err = 0;
  gsl_integration_qags(&f, 0.0, eps, 1e-15, 1e-13, 1000, w, &inside, &err);
  gsl_integration_qags(&f, eps, pi, 1e-15, 1e-13, 1000, w, &outside, &err);
  gsl_integration_workspace_free(w);
  return inside / (inside + outside);
}

}  // namespace

TEST_CASE("c_alpha_extrinsic") {
  CHECK(c_alpha_extrinsic(1e-9, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(c_alpha_extrinsic(0.25, 0.0) == doctest::Approx(0.75 / std::sqrt(0.5)).epsilon(1e-14));
  // 0.75 / (sqrt(0.5) cos(pi/6) - 0.25 sin(pi/6))
  const double expected = 0.75 / (std::sqrt(0.5) * std::sqrt(3.0) / 2 - 0.125);
  CHECK(c_alpha_extrinsic(0.25, pi / 6) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(c_alpha_extrinsic(0.25, pi / 6) == doctest::Approx(1.53887).epsilon(1e-5));
  CHECK(kind_of([] { c_alpha_extrinsic(0.5, 0.0); }) == ErrorKind::InadmissibleAlpha);
  CHECK(kind_of([] { c_alpha_extrinsic(0.47, pi / 6); }) == ErrorKind::InadmissibleAlpha);
  CHECK(kind_of([] { c_alpha_extrinsic(0.0, 0.1); }) == ErrorKind::InadmissibleAlpha);
  CHECK(max_alpha_extrinsic(pi / 6) ==
        doctest::Approx(std::tan(pi / 12) / std::tan(pi / 6)));
}

TEST_CASE("c_alpha_intrinsic") {
  CHECK(c_alpha_intrinsic(1e-12, 1.0) == doctest::Approx(1.0));
  CHECK(c_alpha_intrinsic(0.25, 2.0) == doctest::Approx(2.12132).epsilon(1e-5));
  CHECK(c_alpha_intrinsic(0.4, 1.0) == doctest::Approx(1.34164).epsilon(1e-5));
  CHECK(kind_of([] { c_alpha_intrinsic(0.5, 1.0); }) == ErrorKind::InadmissibleAlpha);
  CHECK(c_alpha_intrinsic(0.5 - 1e-12, 1.0) > 1e5);
}

TEST_CASE("property: c_alpha monotone in alpha") {
  for (double psi : {0.0, 0.3, pi / 6}) {
    const double top = psi == 0.0 ? 0.5 : max_alpha_extrinsic(psi);
    double prev_e = 0.0, prev_i = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double a = top * i / 101.0;
      const double ce = c_alpha_extrinsic(a, psi);
      const double ci = c_alpha_intrinsic(std::min(a, 0.499), 2.0);
      CHECK(ce >= 1.0);
      CHECK(ce > prev_e);
      CHECK(ci >= prev_i);
      prev_e = ce;
      prev_i = ci;
    }
  }
  CHECK(c_alpha_extrinsic(0.2, 0.3) > c_alpha_extrinsic(0.2, 0.1));
}

TEST_CASE("phi and theorem_bound") {
  CHECK(phi(0.3, 0.3 - 1e-9) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(phi(0.5, 0.1) == doctest::Approx(0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(5.0)));
  CHECK(phi(0.5, 0.1) == doctest::Approx(0.5108).epsilon(1e-4));
  CHECK(phi(0.3, 0.05) == doctest::Approx(0.3238).epsilon(1e-4));
  CHECK(kind_of([] { phi(0.3, 0.4); }) == ErrorKind::DomainError);
  CHECK(theorem_bound(10, 0.5, 0.1) == doctest::Approx(0.00604).epsilon(1e-3));
  CHECK(theorem_bound(30, 0.3, 0.05) == doctest::Approx(6.05e-5).epsilon(1e-2));
  CHECK(theorem_bound(11, 0.5, 0.1) < theorem_bound(10, 0.5, 0.1));
  CHECK(kind_of([] { theorem_bound(0, 0.5, 0.1); }) == ErrorKind::DomainError);
}

TEST_CASE("chebyshev levels") {
  CHECK(eta_chebyshev_extrinsic(0.5, 5, 60, 0.0) == 0.0);
  CHECK(eta_chebyshev_extrinsic(0.5, 5, 60, 0.04) == doctest::Approx(0.0533).epsilon(1e-3));
  CHECK(eta_chebyshev_extrinsic(1e-3, 5, 60, 0.04) == 1.0);
  CHECK(eta_chebyshev_intrinsic(0.5, 5, 60, 2.0, 0.04) == doctest::Approx(0.0533).epsilon(1e-3));
  CHECK(eta_chebyshev_intrinsic(0.5, 15, 60, 1.0, 0.1) == doctest::Approx(0.1));
  CHECK(kind_of([] { eta_chebyshev_intrinsic(0.5, 61, 60, 1.0, 0.1); }) ==
        ErrorKind::DomainError);
  CHECK(kind_of([] { eta_chebyshev_intrinsic(0.0, 5, 60, 1.0, 0.1); }) ==
        ErrorKind::DomainError);
}

TEST_CASE("vmf geodesic cdf") {
  CHECK(vmf_geodesic_cdf(0.0, 30, 2) == 0.0);
  CHECK(vmf_geodesic_cdf(pi, 30, 2) == doctest::Approx(1.0).epsilon(1e-15));
  for (double kappa : {0.5, 5.0, 30.0, 200.0}) {
    for (double eps : {0.05, 0.2, 0.6, 1.5, 3.0}) {
      CHECK(std::abs(vmf_geodesic_cdf(eps, kappa, 2) - vmf_geodesic_cdf_s2(eps, kappa)) < 1e-9);
    }
  }
  // Closed form (e^k - e^{k cos 0.2}) / (e^k - e^{-k}) at k = 30.
  const double closed = -std::expm1(30 * (std::cos(0.2) - 1)) / -std::expm1(-60.0);
  CHECK(vmf_geodesic_cdf(0.2, 30, 2) == doctest::Approx(closed).epsilon(1e-12));
  CHECK(vmf_geodesic_cdf(0.2, 30, 2) == doctest::Approx(0.45009).epsilon(1e-4));

  for (int d : {3, 7, 20}) {
    for (double eps : {0.1, 0.4, 1.0}) {
      CHECK(vmf_geodesic_cdf(eps, 20, d) == doctest::Approx(gsl_cdf(eps, 20, d)).epsilon(1e-9));
    }
  }
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double v = vmf_geodesic_cdf(pi * i / 50, 7.0, 4);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(kind_of([] { vmf_geodesic_cdf(-0.1, 30, 2); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { vmf_geodesic_cdf(0.1, 0.0, 2); }) == ErrorKind::DomainError);
}

TEST_CASE("vmf confidence radius") {
  const double r = vmf_confidence_radius(0.95, 30, 2);
  // Closed-form inverse on S^2: cos r = 1 + log(1 - q (1 - e^{-2k})) / k.
  const double closed = std::acos(1.0 + std::log1p(-0.95 * -std::expm1(-60.0)) / 30.0);
  CHECK(r == doctest::Approx(closed).epsilon(1e-10));
  CHECK(r == doctest::Approx(0.4510).epsilon(1e-3));
  const double r7 = vmf_confidence_radius(0.95, 20, 7);
  CHECK(r7 > 0.0);
  CHECK(r7 < pi);
  for (double q : {0.5, 0.9, 0.95, 0.99}) {
    for (int d : {2, 7}) {
      CHECK(std::abs(vmf_geodesic_cdf(vmf_confidence_radius(q, 20, d), 20, d) - q) < 1e-9);
    }
  }
  CHECK(vmf_confidence_radius(1e-12, 30, 2) < 1e-4);
  CHECK(vmf_confidence_radius(1 - 1e-15, 1, 2) > 3.0);
  CHECK(kind_of([] { vmf_confidence_radius(1.0, 30, 2); }) == ErrorKind::DomainError);
}
