#include "mom/cli/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>

#include "mom/bounds.hpp"
#include "mom/manifolds.hpp"
#include "mom/random.hpp"

namespace mom::cli {

namespace {

// sim4: N(0, kappa I) in isometric coordinates. Calibrated once so
// the no-outlier m = 1 cell averages about 0.263 (400 replicates: 0.2628 at 1.0).
constexpr double kSim4Kappa = 1.0;
// sim5: N(0, kappa Sigma), Sigma = diag(linspace(1, 20, 6)). Chosen
// so the no-outlier dim-3 PGA cell lands near 0.147 (200 replicates: 0.1488);
// dims 1 and 2 then sit at 0.457 / 0.279.
constexpr double kSim5Kappa = 0.0112;
// Uniform SPD outliers put the geodesic radius in [r, f r]. f = 3 brings the
// k = 15 sample-mean cell of sim4 to about 0.40 (reference value 0.53); at
// f = 4 the outliers reach condition numbers near 1e12 and the solvers stop
// resolving the objective.
constexpr double kSpdOutlierRadiusFactor = 3.0;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::ConfigError, what);
}

bool is_spd(Experiment e) { return e == Experiment::Sim4 || e == Experiment::Sim5; }

int sphere_dim(Experiment e) { return e == Experiment::Sim2 ? 7 : 2; }

Point sphere_center(int d) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
  v[d] = 1.0;
  return Point::sphere(v);
}

Point spd_identity(int n) { return Point::spd(Eigen::MatrixXd::Identity(n, n)); }

SpdLogNormalParams spd_params(const ExperimentConfig& c) {
  SpdLogNormalParams p;
  p.n = 3;
  p.kappa = c.kappa;
  p.sigma = c.experiment == Experiment::Sim5
                ? Eigen::MatrixXd(Eigen::VectorXd::LinSpaced(6, 1.0, 20.0).asDiagonal())
                : Eigen::MatrixXd::Identity(6, 6);
  return p;
}

Point true_center(const ExperimentConfig& c) {
  return is_spd(c.experiment) ? spd_identity(3) : sphere_center(sphere_dim(c.experiment));
}

// n - k clean draws followed by k outliers.
struct Sample {
  std::vector<Point> points;
  std::size_t clean = 0;
};

Sample draw_sample(const ExperimentConfig& c, std::size_t k, std::uint64_t seed) {
  const std::size_t clean = c.n - k;
  const std::uint64_t s_clean = derive_seed(seed, 0);
  const std::uint64_t s_out = derive_seed(seed, 1);
  Sample out;
  out.clean = clean;
  if (is_spd(c.experiment)) {
    const auto p = spd_params(c);
    out.points = sample_spd_lognormal(p, clean, s_clean);
    auto extra = sample_outlier(p, c.confidence_level, k, s_out, c.outlier_mode,
                                c.spd_radius_factor);
    out.points.insert(out.points.end(), extra.begin(), extra.end());
  } else {
    const VmfParams p{true_center(c), c.kappa};
    out.points = sample_vmf(p, clean, s_clean);
    auto extra = sample_outlier(p, c.confidence_level, k, s_out, c.outlier_mode);
    out.points.insert(out.points.end(), extra.begin(), extra.end());
  }
  return out;
}

struct Accumulator {
  std::vector<double> values;
  int failures = 0;

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? std::nan("") : s / static_cast<double>(values.size());
  }
  double se() const {
    if (values.size() < 2) return std::nan("");
    const double mu = mean();
    double s = 0.0;
    for (double v : values) s += (v - mu) * (v - mu);
    return std::sqrt(s / static_cast<double>(values.size() - 1) /
                     static_cast<double>(values.size()));
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  return buf;
}

void check_failures(const std::string& label, int failures, int runs) {
  if (static_cast<double>(failures) > 0.01 * static_cast<double>(runs)) {
    throw Error(ErrorKind::NotConverged,
                label + ": " + std::to_string(failures) + " of " +
                    std::to_string(runs) + " replicates failed");
  }
}

// Runs `body(r)` for r in [0, runs) on the worker pool and returns the
// per-replicate results in index order.
template <typename Result, typename Body>
std::vector<Result> replicate(int runs, int threads, Body body) {
  std::vector<Result> results(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int r = 0; r < runs; ++r) {
    try {
      results[static_cast<std::size_t>(r)] = body(r);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Sim1: return "sim1";
    case Experiment::Sim2: return "sim2";
    case Experiment::Sim3: return "sim3";
    case Experiment::Sim4: return "sim4";
    case Experiment::Sim5: return "sim5";
    case Experiment::Hands: return "hands";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& text) {
  for (Experiment e : {Experiment::Sim1, Experiment::Sim2, Experiment::Sim3,
                       Experiment::Sim4, Experiment::Sim5, Experiment::Hands}) {
    if (to_string(e) == text) return e;
  }
  config_error("unknown experiment '" + text + "'");
}

ExperimentConfig ExperimentConfig::defaults(Experiment e, bool full) {
  ExperimentConfig c;
  c.experiment = e;
  c.outlier_mode = OutlierMode::UniformBeyondRadius;
  c.spd_radius_factor = kSpdOutlierRadiusFactor;
  switch (e) {
    case Experiment::Sim1:
    case Experiment::Sim3:
      c.n = 60;
      c.kappa = 30.0;
      c.outlier_counts = {0, 5, 10, 15};
      c.group_counts = {1, 5, 15, 30, 60};
      c.runs = full ? (e == Experiment::Sim1 ? 1000 : 1200) : 200;
      c.metric = e == Experiment::Sim1 ? MetricKind::Intrinsic : MetricKind::Extrinsic;
      break;
    case Experiment::Sim2:
      c.n = 200;
      c.kappa = 20.0;
      c.outlier_counts = {0, 10, 20, 40};
      c.group_counts = {1, 10, 50, 100, 200};
      c.runs = full ? 1000 : 200;
      break;
    case Experiment::Sim4:
      c.n = 60;
      c.kappa = kSim4Kappa;
      c.outlier_counts = {0, 5, 10, 15};
      c.group_counts = {1, 5, 15, 30, 60};
      c.runs = full ? 1200 : 200;
      break;
    case Experiment::Sim5:
      c.n = 60;
      c.kappa = kSim5Kappa;
      c.outlier_counts = {0, 5, 10, 15, 20};
      c.group_counts = {5, 10, 15};
      c.runs = full ? 200 : 100;
      break;
    case Experiment::Hands:
      c.n = 21;
      c.kappa = 0.0;
      c.outlier_counts = {3};
      c.group_counts = {7};
      c.runs = 1;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  solver.validate();
  if (runs < 1) config_error("runs must be >= 1");
  if (outlier_counts.empty() || group_counts.empty()) {
    config_error("outlier and group lists must be non-empty");
  }
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    config_error("confidence level must lie in (0, 1)");
  }
  if (!(spd_radius_factor > 1.0)) config_error("radius factor must exceed 1");
  if (experiment != Experiment::Hands && !(kappa > 0.0)) config_error("kappa must be > 0");
  if (is_spd(experiment) && metric == MetricKind::Extrinsic) {
    config_error("extrinsic metric is defined on the sphere only");
  }
  for (int k : outlier_counts) {
    if (k < 0) config_error("outlier counts must be >= 0");
    if (experiment != Experiment::Hands && static_cast<std::size_t>(k) >= n) {
      config_error("outlier count must be below n");
    }
  }
  for (int m : group_counts) {
    if (m < 1) config_error("group counts must be >= 1");
    if (experiment != Experiment::Hands && static_cast<std::size_t>(m) > n) {
      config_error("group count must not exceed n");
    }
  }
  for (int d : dims) {
    if (d < 1 || d > 6) config_error("submanifold dimensions must lie in [1, 6]");
  }
}

int resolve_threads(int requested) {
  int cap = 0;
  if (const char* env = std::getenv("MOM_THREADS")) cap = std::atoi(env);
  int t = requested > 0 ? requested : (cap > 0 ? cap : omp_get_max_threads());
  if (cap > 0) t = std::min(t, cap);
  return std::max(t, 1);
}

// ---------------------------------------------------------------------------
// Sim1-Sim4

const Cell& ResultTable::at(int k, int m) const {
  for (const Cell& c : cells) {
    if (c.k == k && c.m == m) return c;
  }
  throw Error(ErrorKind::ConfigError, "no cell (" + std::to_string(k) + ", " +
                                          std::to_string(m) + ")");
}

std::string ResultTable::to_csv() const {
  std::string out = "k,m,rho_mom_mean,rho_mom_se,rho_submean_mean,rho_submean_se,runs,failures\n";
  for (const Cell& c : cells) {
    out += std::to_string(c.k) + "," + std::to_string(c.m) + "," + fmt(c.rho_mom_mean) + "," +
           fmt(c.rho_mom_se) + "," + fmt(c.rho_submean_mean) + "," + fmt(c.rho_submean_se) +
           "," + std::to_string(c.runs) + "," + std::to_string(c.failures) + "\n";
  }
  return out;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == Experiment::Sim5 || config.experiment == Experiment::Hands) {
    config_error("run_experiment covers sim1-sim4");
  }
  const Point mu = true_center(config);
  const SubsetEstimator estimator = default_subset_estimator(mu.manifold(), config.metric);
  const std::size_t nk = config.outlier_counts.size();
  const std::size_t nm = config.group_counts.size();

  struct Outcome {
    bool ok = false;
    double mom = 0.0;
    double sub = 0.0;
  };
  using Replicate = std::vector<Outcome>;  // nk * nm

  const auto results = replicate<Replicate>(
      config.runs, resolve_threads(config.threads), [&](int r) {
        const std::uint64_t seed_r = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        Replicate out(nk * nm);
        for (std::size_t ki = 0; ki < nk; ++ki) {
          const int k = config.outlier_counts[ki];
          const std::uint64_t seed_k = derive_seed(seed_r, static_cast<std::uint64_t>(k));
          const Sample sample = draw_sample(config, static_cast<std::size_t>(k), seed_k);
          for (std::size_t mi = 0; mi < nm; ++mi) {
            const int m = config.group_counts[mi];
            SolverConfig solver = config.solver;
            solver.seed = derive_seed(derive_seed(seed_k, 2), static_cast<std::uint64_t>(m));
            try {
              const MomResult res =
                  median_of_means(sample.points, static_cast<std::size_t>(m), estimator,
                                  config.metric, solver, Execution::Serial);
              double sub = 0.0;
              for (const Point& p : res.subset_estimates) sub += distance(p, mu, config.metric);
              sub /= static_cast<double>(res.subset_estimates.size());
              out[ki * nm + mi] = {true, distance(res.median.estimate, mu, config.metric), sub};
            } catch (const Error&) {
              out[ki * nm + mi] = {false, 0.0, 0.0};
            }
          }
        }
        return out;
      });

  ResultTable table{config.experiment, {}};
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t mi = 0; mi < nm; ++mi) {
      Accumulator mom, sub;
      constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
      std::vector<double> samples, sub_samples;
      samples.reserve(results.size());
      sub_samples.reserve(results.size());
      for (const Replicate& rep : results) {
        const Outcome& o = rep[ki * nm + mi];
        samples.push_back(o.ok ? o.mom : kNaN);
        sub_samples.push_back(o.ok ? o.sub : kNaN);
        if (!o.ok) {
          ++mom.failures;
          continue;
        }
        mom.values.push_back(o.mom);
        sub.values.push_back(o.sub);
      }
      const int k = config.outlier_counts[ki], m = config.group_counts[mi];
      check_failures("cell k=" + std::to_string(k) + " m=" + std::to_string(m), mom.failures,
                     config.runs);
      table.cells.push_back({k, m, mom.mean(), mom.se(), sub.mean(), sub.se(),
                             static_cast<int>(mom.values.size()), mom.failures,
                             std::move(samples), std::move(sub_samples)});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Sim5

const MssrCell& MssrTable::at(int k, const std::string& method, int m, int dim) const {
  for (const MssrCell& c : cells) {
    if (c.k == k && c.method == method && c.m == m && c.dim == dim) return c;
  }
  throw Error(ErrorKind::ConfigError, "no such mSSR cell");
}

std::string MssrTable::to_csv() const {
  std::string out = "k,method,m,dim,mssr_mean,mssr_se,runs,failures\n";
  for (const MssrCell& c : cells) {
    out += std::to_string(c.k) + "," + c.method + "," + std::to_string(c.m) + "," +
           std::to_string(c.dim) + "," + fmt(c.mssr_mean) + "," + fmt(c.mssr_se) + "," +
           std::to_string(c.runs) + "," + std::to_string(c.failures) + "\n";
  }
  return out;
}

MssrTable run_rpga_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != Experiment::Sim5) config_error("run_rpga_experiment covers sim5");
  MssrTable table;
  std::vector<int> groups;
  for (int m : config.group_counts) {
    if (config.n / static_cast<std::size_t>(m) < 2) {
      table.skipped_groups.push_back(m);
    } else {
      groups.push_back(m);
    }
  }
  const int max_dim = *std::max_element(config.dims.begin(), config.dims.end());
  const std::size_t nk = config.outlier_counts.size();
  const std::size_t methods = 1 + groups.size();
  const std::size_t nd = config.dims.size();

  struct Outcome {
    bool ok = false;
    double mssr = 0.0;
  };
  using Replicate = std::vector<Outcome>;  // nk * methods * nd

  const auto results = replicate<Replicate>(
      config.runs, resolve_threads(config.threads), [&](int r) {
        const std::uint64_t seed_r = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        Replicate out(nk * methods * nd);
        for (std::size_t ki = 0; ki < nk; ++ki) {
          const int k = config.outlier_counts[ki];
          const std::uint64_t seed_k = derive_seed(seed_r, static_cast<std::uint64_t>(k));
          const Sample sample = draw_sample(config, static_cast<std::size_t>(k), seed_k);
          const std::span<const Point> clean(sample.points.data(), sample.clean);
          for (std::size_t j = 0; j < methods; ++j) {
            const std::size_t base = (ki * methods + j) * nd;
            try {
              TangentBasis basis = [&] {
                if (j == 0) {
                  const Point center =
                      intrinsic_mean_gradient(sample.points, config.solver).estimate;
                  return pga(sample.points, center, max_dim, config.coordinates);
                }
                RpgaConfig rc;
                rc.solver = config.solver;
                rc.solver.seed = derive_seed(derive_seed(seed_k, 2),
                                             static_cast<std::uint64_t>(groups[j - 1]));
                rc.mode = config.coordinates;
                rc.execution = Execution::Serial;
                return rpga(sample.points, static_cast<std::size_t>(groups[j - 1]), max_dim,
                            rc);
              }();
              for (std::size_t di = 0; di < nd; ++di) {
                out[base + di] = {true, mssr(clean, basis, config.dims[di], {},
                                             Execution::Serial)};
              }
            } catch (const Error&) {
              for (std::size_t di = 0; di < nd; ++di) out[base + di] = {false, 0.0};
            }
          }
        }
        return out;
      });

  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t j = 0; j < methods; ++j) {
      for (std::size_t di = 0; di < nd; ++di) {
        Accumulator acc;
        std::vector<double> samples;
        samples.reserve(results.size());
        for (const Replicate& rep : results) {
          const Outcome& o = rep[(ki * methods + j) * nd + di];
          samples.push_back(o.ok ? o.mssr : std::numeric_limits<double>::quiet_NaN());
          if (o.ok) {
            acc.values.push_back(o.mssr);
          } else {
            ++acc.failures;
          }
        }
        const int k = config.outlier_counts[ki];
        const std::string method = j == 0 ? "PGA" : "RPGA";
        const int m = j == 0 ? 1 : groups[j - 1];
        check_failures("cell k=" + std::to_string(k) + " " + method + " m=" + std::to_string(m),
                       acc.failures, config.runs);
        table.cells.push_back({k, method, m, config.dims[di], acc.mean(), acc.se(),
                               static_cast<int>(acc.values.size()), acc.failures,
                               std::move(samples)});
      }
    }
  }
  return table;
}

}  // namespace mom::cli
