#include "mom/samplers.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include "mom/bounds.hpp"
#include "mom/random.hpp"

namespace mom {

namespace {

constexpr std::size_t kRejectionBudget = 1'000'000;
constexpr std::size_t kCalibrationDraws = 100'000;
constexpr std::uint64_t kCalibrationSeed = 0x5eedca1bULL;

void check_vmf(const VmfParams& p) {
  if (p.mu.manifold().kind != ManifoldKind::Sphere) {
    throw Error(ErrorKind::ManifoldMismatch, "vMF center must lie on a sphere");
  }
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) {
    throw Error(ErrorKind::DomainError, "vMF concentration must be positive");
  }
}

void check_spd(const SpdLogNormalParams& p) {
  const Eigen::Index dim = p.n * (p.n + 1) / 2;
  if (p.n < 1 || p.sigma.rows() != dim || p.sigma.cols() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "sigma must be (n(n+1)/2)^2");
  }
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) {
    throw Error(ErrorKind::DomainError, "log-normal scale must be positive");
  }
  if ((p.sigma - p.sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::DomainError, "sigma must be symmetric");
  }
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::DomainError, "confidence level must lie in (0, 1)");
  }
}

double beta_draw(Rng& rng, double a) {
  std::gamma_distribution<double> g(a, 1.0);
  const double x = g(rng);
  const double y = g(rng);
  return x / (x + y);
}

// Unit vector orthogonal to mu, uniformly distributed.
Eigen::VectorXd tangent_direction(Rng& rng, const Eigen::VectorXd& mu) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::VectorXd v(mu.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    v -= mu.dot(v) * mu;
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
}

// Wood (1994): rejection sampler for the cosine W = <x, mu>.
class VmfDraw {
 public:
  explicit VmfDraw(const VmfParams& p)
      : mu_(p.mu.coords()), kappa_(p.kappa), dim_(static_cast<double>(mu_.size() - 1)) {
    b_ = dim_ / (2.0 * kappa_ + std::sqrt(4.0 * kappa_ * kappa_ + dim_ * dim_));
    x0_ = (1.0 - b_) / (1.0 + b_);
    c_ = kappa_ * x0_ + dim_ * std::log1p(-x0_ * x0_);
  }

  Eigen::VectorXd operator()(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double w = 1.0;
    for (;;) {
      const double z = beta_draw(rng, 0.5 * dim_);
      w = (1.0 - (1.0 + b_) * z) / (1.0 - (1.0 - b_) * z);
      const double u = unif(rng);
      if (kappa_ * w + dim_ * std::log1p(-x0_ * w) - c_ >= std::log(u)) break;
    }
    w = std::clamp(w, -1.0, 1.0);
    Eigen::VectorXd x = w * mu_ + std::sqrt(1.0 - w * w) * tangent_direction(rng, mu_);
    return x / x.norm();
  }

 private:
  Eigen::VectorXd mu_;
  double kappa_, dim_, b_, x0_, c_;
};

// z ~ N(0, kappa * sigma) in isometric symmetric coordinates.
class CoordDraw {
 public:
  explicit CoordDraw(const SpdLogNormalParams& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.kappa * p.sigma);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = eig.eigenvectors() * root.asDiagonal();
  }

  Eigen::VectorXd operator()(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd g(factor_.cols());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
    return factor_ * g;
  }

 private:
  Eigen::MatrixXd factor_;
};

Point spd_from_coords(const Eigen::VectorXd& z, int n) {
  return PointAccess::make(ManifoldId::spd(n),
                           spd::flatten(spd::sym_exp(spd::coords_to_sym(z, n))));
}

Point sphere_point(Eigen::VectorXd x) {
  const auto id = ManifoldId::sphere(static_cast<int>(x.size()) - 1);
  return PointAccess::make(id, std::move(x));
}

}  // namespace

std::vector<Point> sample_vmf(const VmfParams& params, std::size_t n,
                              std::uint64_t seed) {
  check_vmf(params);
  Rng rng = make_rng(seed);
  const VmfDraw draw(params);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sphere_point(draw(rng)));
  return out;
}

std::vector<Point> sample_spd_lognormal(const SpdLogNormalParams& params,
                                        std::size_t n, std::uint64_t seed) {
  check_spd(params);
  Rng rng = make_rng(seed);
  const CoordDraw draw(params);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(spd_from_coords(draw(rng), params.n));
  return out;
}

double spd_confidence_radius(const SpdLogNormalParams& params,
                             double confidence_level) {
  check_spd(params);
  check_level(confidence_level);
  using Key = std::tuple<int, double, std::vector<double>, double>;
  static std::mutex mutex;
  static std::map<Key, double> cache;

  Key key{params.n, params.kappa,
          std::vector<double>(params.sigma.data(),
                              params.sigma.data() + params.sigma.size()),
          confidence_level};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  // d(X, I) = |Log X|_F = |z| in isometric coordinates.
  Rng rng = make_rng(kCalibrationSeed);
  const CoordDraw draw(params);
  std::vector<double> radii(kCalibrationDraws);
  for (double& r : radii) r = draw(rng).norm();
  const auto rank = static_cast<std::size_t>(
      std::ceil(confidence_level * static_cast<double>(radii.size()))) - 1;
  std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(rank),
                   radii.end());
  const double radius = radii[rank];

  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), radius);
  return radius;
}

std::vector<Point> sample_outlier(const VmfParams& base, double confidence_level,
                                  std::size_t n_outliers, std::uint64_t seed,
                                  OutlierMode mode) {
  check_vmf(base);
  check_level(confidence_level);
  std::vector<Point> out;
  if (n_outliers == 0) return out;
  const int d = base.mu.manifold().param;
  const double radius = bounds::vmf_confidence_radius(confidence_level, base.kappa, d);
  const Eigen::VectorXd& mu = base.mu.coords();

  Rng rng = make_rng(seed);
  const VmfDraw draw(base);
  std::normal_distribution<double> normal;
  std::size_t proposals = 0;
  while (out.size() < n_outliers) {
    if (++proposals > kRejectionBudget) {
      throw Error(ErrorKind::RejectionBudgetExceeded,
                  "no outlier beyond radius " + std::to_string(radius));
    }
    Eigen::VectorXd x;
    if (mode == OutlierMode::ConditionalTail) {
      x = draw(rng);
    } else {
      x.resize(mu.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
      const double nx = x.norm();
      if (nx < 1e-12) continue;
      x /= nx;
    }
    Point p = sphere_point(std::move(x));
    if (distance(base.mu, p) > radius) out.push_back(std::move(p));
  }
  return out;
}

std::vector<Point> sample_outlier(const SpdLogNormalParams& base,
                                  double confidence_level, std::size_t n_outliers,
                                  std::uint64_t seed, OutlierMode mode,
                                  double radius_factor) {
  check_spd(base);
  check_level(confidence_level);
  if (!(radius_factor > 1.0)) {
    throw Error(ErrorKind::DomainError, "radius factor must exceed 1");
  }
  std::vector<Point> out;
  if (n_outliers == 0) return out;
  const double radius = spd_confidence_radius(base, confidence_level);

  Rng rng = make_rng(seed);
  const CoordDraw draw(base);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(1.0, radius_factor);
  const Eigen::Index dim = base.n * (base.n + 1) / 2;
  std::size_t proposals = 0;
  while (out.size() < n_outliers) {
    if (++proposals > kRejectionBudget) {
      throw Error(ErrorKind::RejectionBudgetExceeded,
                  "no outlier beyond radius " + std::to_string(radius));
    }
    Eigen::VectorXd z;
    if (mode == OutlierMode::ConditionalTail) {
      z = draw(rng);
    } else {
      z.resize(dim);
      for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal(rng);
      const double nz = z.norm();
      if (nz < 1e-12) continue;
      z *= radius * unif(rng) / nz;
    }
    if (z.norm() > radius) out.push_back(spd_from_coords(z, base.n));
  }
  return out;
}

Point ellipse_shape(double a, double b, int landmarks) {
  if (!(a > 0.0 && b > 0.0) || landmarks < 3) {
    throw Error(ErrorKind::DomainError, "ellipse needs a, b > 0 and K >= 3");
  }
  Eigen::VectorXd z(2 * landmarks);
  for (int k = 0; k < landmarks; ++k) {
    const double t = 2.0 * std::numbers::pi * k / landmarks;
    z[2 * k] = a * std::cos(t);
    z[2 * k + 1] = b * std::sin(t);
  }
  return PointAccess::make(ManifoldId::planar_shape(landmarks), shape::to_preshape(z));
}

}  // namespace mom
