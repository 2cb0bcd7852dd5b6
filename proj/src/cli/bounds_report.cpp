#include <cstdio>

#include "mom/bounds.hpp"
#include "mom/cli/experiment.hpp"
#include "mom/manifolds.hpp"
#include "mom/random.hpp"

namespace mom::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

}  // namespace

std::string BoundsReport::to_csv() const {
  std::string out = "m,alpha,eta,c_alpha,bound,status\n";
  for (const BoundRow& r : rows) {
    out += std::to_string(r.m) + "," + fmt(r.alpha) + "," + fmt(r.eta) + "," +
           fmt(r.c_alpha) + "," + fmt(r.bound) + "," + r.status + "\n";
  }
  return out;
}

BoundsReport report_bounds(const BoundsConfig& config) {
  const ExperimentConfig& base = config.base;
  base.validate();
  if (base.experiment == Experiment::Sim5 || base.experiment == Experiment::Hands) {
    throw Error(ErrorKind::ConfigError, "bounds are reported for sim1-sim4");
  }
  if (!(config.epsilon > 0.0)) throw Error(ErrorKind::ConfigError, "epsilon must be > 0");
  if (config.alphas.empty()) throw Error(ErrorKind::ConfigError, "empty alpha grid");

  // Second moment E rho^2(mu, x) of the clean law, by Monte Carlo.
  ExperimentConfig clean = base;
  const bool spd = base.experiment == Experiment::Sim4;
  const Point mu = spd ? Point::spd(Eigen::Matrix3d::Identity())
                       : [&] {
                           const int d = base.experiment == Experiment::Sim2 ? 7 : 2;
                           Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
                           v[d] = 1.0;
                           return Point::sphere(v);
                         }();
  std::vector<Point> draws;
  const auto draws_n = static_cast<std::size_t>(config.second_moment_draws);
  const std::uint64_t seed = derive_seed(base.seed, 0xB0);
  if (spd) {
    SpdLogNormalParams p;
    p.kappa = base.kappa;
    draws = sample_spd_lognormal(p, draws_n, seed);
  } else {
    draws = sample_vmf({mu, base.kappa}, draws_n, seed);
  }
  double m2 = 0.0;
  for (const Point& x : draws) {
    const double d = distance(mu, x, base.metric);
    m2 += d * d;
  }
  m2 /= static_cast<double>(draws.size());

  BoundsReport report;
  report.second_moment = m2;
  report.lipschitz_K = spec_of(mu.manifold()).log_lipschitz_K;
  const bool extrinsic = base.metric == MetricKind::Extrinsic;
  for (int m : base.group_counts) {
    for (double alpha : config.alphas) {
      BoundRow row;
      row.m = m;
      row.alpha = alpha;
      row.eta = extrinsic ? bounds::eta_chebyshev_extrinsic(config.epsilon, m, base.n, m2)
                          : bounds::eta_chebyshev_intrinsic(config.epsilon, m, base.n,
                                                            report.lipschitz_K, m2);
      try {
        row.c_alpha = extrinsic ? bounds::c_alpha_extrinsic(alpha, config.psi_bar)
                                : bounds::c_alpha_intrinsic(alpha, report.lipschitz_K);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InadmissibleAlpha) throw;
        row.c_alpha = std::nan("");
        row.status = "inadmissible";
        report.rows.push_back(row);
        continue;
      }
      if (row.eta > 0.0 && row.eta < alpha) {
        row.bound = bounds::theorem_bound(static_cast<std::size_t>(m), alpha, row.eta);
        row.status = "ok";
      } else if (row.eta == 0.0) {
        row.bound = 0.0;
        row.status = "ok";
      } else {
        row.bound = 1.0;
        row.status = "vacuous";
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace mom::cli
