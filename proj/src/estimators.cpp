#include "mom/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <optional>

#include "mom/random.hpp"

namespace mom {

namespace {

using Vec = Eigen::VectorXd;

constexpr double kAnchorRadius = 1e-12;
constexpr int kMaxHalvings = 40;
constexpr int kMaxExpansions = 30;
constexpr double kMinScale = 1.0 / 1024.0;

// Objective comparisons tolerate this much relative rounding noise.
constexpr double kRoundingSlack = 1e-14;

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Canonically ordered input with exact duplicates merged into weights.
struct Sample {
  ManifoldId id;
  std::vector<Vec> x;
  std::vector<double> w;
  double total = 0.0;
};

Sample make_sample(std::span<const Point> points) {
  if (points.empty()) {
    throw Error(ErrorKind::DomainError, "estimator needs at least one point");
  }
  Sample s;
  s.id = points.front().manifold();
  for (const Point& p : points) {
    if (!(p.manifold() == s.id)) {
      throw Error(ErrorKind::ManifoldMismatch, "points on different manifolds");
    }
  }
  for (std::size_t i : canonical_order(points)) {
    const Vec& c = points[i].coords();
    if (!s.x.empty() && s.x.back() == c) {
      s.w.back() += 1.0;
    } else {
      s.x.push_back(c);
      s.w.push_back(1.0);
    }
  }
  s.total = static_cast<double>(points.size());
  return s;
}

EstimatorReport single_point_report(const Sample& s) {
  EstimatorReport r{PointAccess::make(s.id, s.x.front())};
  r.objective_trace.push_back(0.0);
  return r;
}

// Per-iterate evaluation: displacement of every sample point as seen from
// the iterate (tangent log, or ambient difference for the chordal case) and
// the corresponding distances.
struct State {
  Chart chart;
  std::vector<Vec> disp;
  std::vector<double> dist;
  double objective = 0.0;
};

using Evaluate = std::function<State(const Point&)>;
using Direction = std::function<Vec(const State&, std::vector<Warning>&)>;

State evaluate_intrinsic(const Sample& s, const Point& x, bool squared) {
  State st{Chart(x)};
  st.disp.reserve(s.x.size());
  st.dist.reserve(s.x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    Vec v = st.chart.log(s.x[i]);
    const double d = st.chart.norm(v);
    st.disp.push_back(std::move(v));
    st.dist.push_back(d);
    acc += s.w[i] * (squared ? d * d : d);
  }
  st.objective = acc / s.total;
  return st;
}

State evaluate_chordal(const Sample& s, const Point& x) {
  State st{Chart(x)};
  double acc = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    Vec v = s.x[i] - x.coords();
    const double d = v.norm();
    st.disp.push_back(std::move(v));
    st.dist.push_back(d);
    acc += s.w[i] * d;
  }
  st.objective = acc / s.total;
  return st;
}

// Descent loop shared by every iterative estimator. `direction` proposes a
// full tangent step at the current iterate; the step is accepted if the
// objective does not increase, otherwise it is halved along the geodesic.
// Convergence is declared on the metric norm of the full proposal.
// With `expand`, an accepted full step is doubled while the objective keeps
// strictly decreasing; Weiszfeld steps shrink like the distance to a nearby
// data point, and without this the iteration crawls when the median sits
// just off an anchor.
// With `damp`, a proposal that points back toward the previous iterate halves
// the step scale, and any other proposal lets it grow back toward 1. Gradient
// steps oscillate in directions where the curvature of far-apart data makes
// the fixed damping too long.
EstimatorReport descend(const Point& start, const Evaluate& evaluate,
                        const Direction& direction, const SolverConfig& config,
                        const char* name, bool expand = false, bool damp = false) {
  State state = evaluate(start);
  EstimatorReport report{start};
  report.objective_trace.push_back(state.objective);
  report.converged = false;
  double step_norm = 0.0;
  std::optional<Point> previous;
  double scale = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const Vec v = direction(state, report.warnings);
    step_norm = state.chart.norm(v);
    report.final_step_norm = step_norm;
    if (step_norm < config.step_tolerance) {
      report.converged = true;
      break;
    }
    if (damp && previous) {
      const bool reversed =
          state.chart.inner(v, state.chart.log(previous->coords())) > 0.0;
      scale = reversed ? std::max(0.5 * scale, kMinScale) : std::min(1.25 * scale, 1.0);
    }
    std::optional<State> next;
    double t = scale;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      State trial = evaluate(state.chart.exp_point(t * v));
      if (trial.objective <=
          state.objective + kRoundingSlack * std::abs(state.objective)) {
        next.emplace(std::move(trial));
        break;
      }
    }
    if (expand && next && t == scale) {
      for (int e = 0; e < kMaxExpansions; ++e) {
        t *= 2.0;
        State trial = evaluate(state.chart.exp_point(t * v));
        if (!(trial.objective < next->objective)) break;
        next.emplace(std::move(trial));
      }
    }
    report.iterations = it + 1;
    if (!next) {
      // No representable decrease remains along the proposal.
      report.converged = step_norm < std::sqrt(config.step_tolerance);
      break;
    }
    if (damp) previous = state.chart.base();
    state = std::move(*next);
    report.objective_trace.push_back(state.objective);
  }
  report.estimate = state.chart.base();
  report.objective = state.objective;
  if (!report.converged && config.fail_on_nonconvergence) {
    throw Error(ErrorKind::NotConverged,
                std::string(name) + " did not converge in " +
                    std::to_string(config.max_iterations) +
                    " iterations (last step " + std::to_string(step_norm) + ")");
  }
  return report;
}

Vec euclidean_mean(const Sample& s) {
  Vec acc = Vec::Zero(s.x.front().size());
  for (std::size_t i = 0; i < s.x.size(); ++i) acc += s.w[i] * s.x[i];
  return acc / s.total;
}

// Cheap non-iterative start point close to the Frechet mean.
Point initial_mean_guess(const Sample& s) {
  switch (s.id.kind) {
    case ManifoldKind::Sphere: {
      const Vec m = euclidean_mean(s);
      if (m.norm() > 1e-12) return PointAccess::make(s.id, m.normalized());
      break;
    }
    case ManifoldKind::PlanarShape: {
      Vec acc = Vec::Zero(s.x.front().size());
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        acc += s.w[i] * shape::align(s.x.front(), s.x[i]);
      }
      if (acc.norm() > 1e-12) {
        return PointAccess::make(s.id, shape::to_preshape(acc));
      }
      break;
    }
    case ManifoldKind::Spd: {
      const int n = s.id.param;
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        acc += s.w[i] * spd::sym_log(spd::unflatten(s.x[i], n));
      }
      return PointAccess::make(s.id, spd::flatten(spd::sym_exp(acc / s.total)));
    }
  }
  return PointAccess::make(s.id, s.x.front());
}

void require_sphere(const ManifoldId& id, const char* what) {
  if (id.kind != ManifoldKind::Sphere) {
    throw Error(ErrorKind::UnsupportedMetric,
                std::string(what) + " is defined only on the sphere");
  }
}

// Weiszfeld start: the best data point, or a data point that already
// satisfies the subgradient optimality condition
//   |sum_{i != j} w_i u_ij| <= w_j,  u_ij unit displacement from p_j to p_i.
struct AnchorScan {
  std::size_t best = 0;
  bool optimal = false;
};

template <typename Displacements>
AnchorScan scan_anchors(const Sample& s, Displacements displacements) {
  AnchorScan scan;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    const Point pj = PointAccess::make(s.id, s.x[j]);
    const Chart chart(pj);
    Vec pull = Vec::Zero(s.x[j].size());
    double objective = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i == j) continue;
      auto [v, d] = displacements(chart, s.x[i]);
      objective += s.w[i] * d;
      if (d > 0.0) pull += (s.w[i] / d) * v;
    }
    // On the sphere the stationarity test also holds at maximum-like points
    // (e.g. antipodal to a cluster), so only the lowest anchor may qualify.
    const bool stationary = chart.norm(chart.project_tangent(pull)) <= s.w[j];
    if (objective < best_objective) {
      best_objective = objective;
      scan = {j, stationary};
    }
  }
  return scan;
}

// Weiszfeld direction sum w_i v_i / d_i / sum w_i / d_i, dropping terms
// whose point coincides with the iterate.
Vec weiszfeld_direction(const Sample& s, const State& st,
                        std::vector<Warning>& warnings) {
  Vec num = Vec::Zero(st.disp.front().size());
  double den = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (st.dist[i] < kAnchorRadius) {
      if (std::find(warnings.begin(), warnings.end(), Warning::AnchorHit) ==
          warnings.end()) {
        warnings.push_back(Warning::AnchorHit);
      }
      continue;
    }
    num += (s.w[i] / st.dist[i]) * st.disp[i];
    den += s.w[i] / st.dist[i];
  }
  if (den == 0.0) return Vec::Zero(num.size());
  return num / den;
}

EstimatorReport anchored_report(const Sample& s, std::size_t j,
                                const Evaluate& evaluate) {
  const Point p = PointAccess::make(s.id, s.x[j]);
  EstimatorReport r{p};
  r.objective = evaluate(p).objective;
  r.objective_trace.push_back(r.objective);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

void SolverConfig::validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorKind::ConfigError, "max_iterations must be >= 1");
  }
  if (!(step_tolerance > 0.0)) {
    throw Error(ErrorKind::ConfigError, "step_tolerance must be > 0");
  }
  if (!(step_size > 0.0 && step_size <= 1.0) ||
      !(gradient_step_size > 0.0 && gradient_step_size <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "step sizes must lie in (0, 1]");
  }
}

bool EstimatorReport::has_warning(Warning w) const {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

std::vector<std::size_t> canonical_order(std::span<const Point> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(points[a].coords(), points[b].coords());
  });
  return order;
}

SubsetPartition partition(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m > n) {
    throw Error(ErrorKind::InvalidGroupCount,
                "need 1 <= m <= n, got m=" + std::to_string(m) +
                    " n=" + std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  SubsetPartition out;
  out.m = m;
  out.groups.resize(m);
  const std::size_t base = n / m;
  const std::size_t extra = n % m;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < m; ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    out.groups[g].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                         perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out.groups[g].begin(), out.groups[g].end());
    pos += size;
  }
  return out;
}

double frechet_objective(std::span<const Point> points, const Point& x) {
  const Chart chart(x);
  double acc = 0.0;
  for (const Point& p : points) {
    const double d = chart.distance(p.coords());
    acc += d * d;
  }
  return acc / static_cast<double>(points.size());
}

double median_objective(std::span<const Point> points, const Point& x,
                        MetricKind metric) {
  double acc = 0.0;
  if (metric == MetricKind::Extrinsic) {
    for (const Point& p : points) acc += distance(x, p, metric);
  } else {
    const Chart chart(x);
    for (const Point& p : points) acc += chart.distance(p.coords());
  }
  return acc / static_cast<double>(points.size());
}

EstimatorReport intrinsic_mean_sphere(std::span<const Point> points,
                                      const SolverConfig& config) {
  config.validate();
  const Sample s = make_sample(points);
  require_sphere(s.id, "the fixed-point intrinsic mean");
  if (s.x.size() == 1) return single_point_report(s);

  std::vector<Warning> warnings;
  const Point start = initial_mean_guess(s);
  for (const Vec& x : s.x) {
    if (!(x.dot(start.coords()) > 0.0)) {
      warnings.push_back(Warning::HemisphereViolation);
      break;
    }
  }

  const Evaluate evaluate = [&](const Point& x) {
    return evaluate_intrinsic(s, x, /*squared=*/true);
  };
  // Psi(x) = sum w_i theta_i / sin(theta_i) p_i; the proposal is Psi/|Psi|,
  // expressed as the tangent vector pointing at it.
  const Direction direction = [&](const State& st, std::vector<Warning>&) {
    const Vec& x = st.chart.base().coords();
    Vec psi = Vec::Zero(x.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double c = std::clamp(x.dot(s.x[i]), -1.0, 1.0);
      const double sine = std::sqrt(std::max(0.0, 1.0 - c * c));
      const double gamma = sine < 1e-8 ? 1.0 : st.dist[i] / sine;
      psi += s.w[i] * gamma * s.x[i];
    }
    const double len = psi.norm();
    if (!(len > 0.0)) return Vec(Vec::Zero(x.size()));
    return Vec(st.chart.log(psi / len));
  };
  SolverConfig first = config;
  first.fail_on_nonconvergence = false;
  EstimatorReport r =
      descend(start, evaluate, direction, first, "intrinsic_mean_sphere");
  if (!r.converged) {
    // The fixed-point map need not contract when points lie far apart; finish
    // with damped gradient descent from the last iterate.
    const Direction gradient = [&](const State& st, std::vector<Warning>&) {
      Vec g = Vec::Zero(st.disp.front().size());
      for (std::size_t i = 0; i < s.x.size(); ++i) g += s.w[i] * st.disp[i];
      return Vec((config.gradient_step_size / s.total) * g);
    };
    EstimatorReport tail =
        descend(r.estimate, evaluate, gradient, config, "intrinsic_mean_sphere",
                false, true);
    tail.iterations += r.iterations;
    r.objective_trace.insert(r.objective_trace.end(),
                             tail.objective_trace.begin() + 1,
                             tail.objective_trace.end());
    tail.objective_trace = std::move(r.objective_trace);
    tail.warnings.insert(tail.warnings.begin(), r.warnings.begin(), r.warnings.end());
    tail.warnings.push_back(Warning::FixedPointStalled);
    r = std::move(tail);
  }
  r.warnings.insert(r.warnings.end(), warnings.begin(), warnings.end());
  return r;
}

EstimatorReport intrinsic_mean_gradient(std::span<const Point> points,
                                        const SolverConfig& config) {
  config.validate();
  const Sample s = make_sample(points);
  if (s.x.size() == 1) return single_point_report(s);

  const Evaluate evaluate = [&](const Point& x) {
    return evaluate_intrinsic(s, x, /*squared=*/true);
  };
  const Direction direction = [&](const State& st, std::vector<Warning>&) {
    Vec g = Vec::Zero(st.disp.front().size());
    for (std::size_t i = 0; i < s.x.size(); ++i) g += s.w[i] * st.disp[i];
    return Vec((config.gradient_step_size / s.total) * g);
  };
  return descend(initial_mean_guess(s), evaluate, direction, config,
                 "intrinsic_mean_gradient", /*expand=*/false, /*damp=*/true);
}

EstimatorReport intrinsic_median(std::span<const Point> points,
                                 const SolverConfig& config) {
  config.validate();
  const Sample s = make_sample(points);
  if (s.x.size() == 1) return single_point_report(s);

  const Evaluate evaluate = [&](const Point& x) {
    return evaluate_intrinsic(s, x, /*squared=*/false);
  };
  const AnchorScan scan =
      scan_anchors(s, [](const Chart& chart, const Vec& q) {
        Vec v = chart.log(q);
        const double d = chart.norm(v);
        return std::pair<Vec, double>(std::move(v), d);
      });
  if (scan.optimal) return anchored_report(s, scan.best, evaluate);

  const Direction direction = [&](const State& st, std::vector<Warning>& w) {
    return Vec(config.step_size * weiszfeld_direction(s, st, w));
  };
  return descend(PointAccess::make(s.id, s.x[scan.best]), evaluate, direction,
                 config, "intrinsic_median", /*expand=*/true);
}

EstimatorReport extrinsic_mean(std::span<const Point> points) {
  const Sample s = make_sample(points);
  require_sphere(s.id, "the extrinsic mean");
  const Vec m = euclidean_mean(s);
  const double len = m.norm();
  if (!(len > 1e-12)) {
    throw Error(ErrorKind::ProjectionUndefined, "Euclidean mean is zero");
  }
  EstimatorReport r{PointAccess::make(s.id, m / len)};
  double acc = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    acc += s.w[i] * (s.x[i] - r.estimate.coords()).squaredNorm();
  }
  r.objective = acc / s.total;
  r.objective_trace.push_back(r.objective);
  return r;
}

EstimatorReport extrinsic_median(std::span<const Point> points,
                                 const SolverConfig& config) {
  config.validate();
  const Sample s = make_sample(points);
  require_sphere(s.id, "the extrinsic median");
  if (s.x.size() == 1) return single_point_report(s);

  const Evaluate evaluate = [&](const Point& x) { return evaluate_chordal(s, x); };
  const AnchorScan scan = scan_anchors(s, [](const Chart& chart, const Vec& q) {
    Vec v = q - chart.base().coords();
    const double d = v.norm();
    return std::pair<Vec, double>(std::move(v), d);
  });
  if (scan.optimal) return anchored_report(s, scan.best, evaluate);

  const Direction direction = [&](const State& st, std::vector<Warning>& w) {
    return Vec(config.step_size *
               st.chart.project_tangent(weiszfeld_direction(s, st, w)));
  };
  return descend(PointAccess::make(s.id, s.x[scan.best]), evaluate, direction,
                 config, "extrinsic_median", /*expand=*/true);
}

MatrixMedianReport frobenius_median(std::span<const Eigen::MatrixXd> matrices,
                                    const SolverConfig& config) {
  config.validate();
  if (matrices.empty()) {
    throw Error(ErrorKind::DomainError, "median needs at least one matrix");
  }
  const Eigen::Index rows = matrices.front().rows();
  const Eigen::Index cols = matrices.front().cols();
  std::vector<Vec> flat;
  for (const Eigen::MatrixXd& a : matrices) {
    if (a.rows() != rows || a.cols() != cols) {
      throw Error(ErrorKind::DimensionMismatch, "matrices differ in shape");
    }
    flat.emplace_back(Eigen::Map<const Vec>(a.data(), a.size()));
  }
  std::sort(flat.begin(), flat.end(), lex_less);
  std::vector<Vec> x;
  std::vector<double> w;
  for (Vec& v : flat) {
    if (!x.empty() && x.back() == v) {
      w.back() += 1.0;
    } else {
      x.push_back(std::move(v));
      w.push_back(1.0);
    }
  }
  const double total = static_cast<double>(matrices.size());
  auto objective = [&](const Vec& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * (x[i] - y).norm();
    return acc / total;
  };
  auto finish = [&](const Vec& y, MatrixMedianReport r) {
    r.estimate = Eigen::Map<const Eigen::MatrixXd>(y.data(), rows, cols);
    r.objective = objective(y);
    return r;
  };

  MatrixMedianReport report;
  if (x.size() == 1) {
    report.objective_trace.push_back(0.0);
    return finish(x.front(), report);
  }

  // Anchor scan: a data point is the median iff the pull of the others does
  // not exceed its own weight.
  std::size_t best = 0;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) {
    Vec pull = Vec::Zero(x[j].size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == j) continue;
      const Vec d = x[i] - x[j];
      pull += (w[i] / d.norm()) * d;
    }
    if (pull.norm() <= w[j]) {
      report.objective_trace.push_back(objective(x[j]));
      return finish(x[j], report);
    }
    const double f = objective(x[j]);
    if (f < best_objective) {
      best_objective = f;
      best = j;
    }
  }

  Vec y = x[best];
  double f = best_objective;
  report.objective_trace.push_back(f);
  report.converged = false;
  for (int it = 0; it < config.max_iterations; ++it) {
    Vec num = Vec::Zero(y.size());
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (x[i] - y).norm();
      if (d < kAnchorRadius) continue;
      num += (w[i] / d) * x[i];
      den += w[i] / d;
    }
    const Vec step = config.step_size * (num / den - y);
    report.final_step_norm = step.norm();
    if (report.final_step_norm < config.step_tolerance) {
      report.converged = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      const Vec trial = y + t * step;
      const double ft = objective(trial);
      if (ft <= f + kRoundingSlack * std::abs(f)) {
        y = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    if (accepted && t == 1.0) {
      // Same step expansion as the manifold medians.
      for (int e = 0; e < kMaxExpansions; ++e) {
        t *= 2.0;
        const Vec trial = y + (t / 2.0) * step;
        const double ft = objective(trial);
        if (!(ft < f)) break;
        y = trial;
        f = ft;
      }
    }
    report.iterations = it + 1;
    if (!accepted) {
      report.converged = report.final_step_norm < std::sqrt(config.step_tolerance);
      break;
    }
    report.objective_trace.push_back(f);
  }
  if (!report.converged && config.fail_on_nonconvergence) {
    throw Error(ErrorKind::NotConverged, "frobenius_median did not converge");
  }
  return finish(y, report);
}

SubsetEstimator default_subset_estimator(ManifoldId id, MetricKind metric) {
  if (metric == MetricKind::Extrinsic) {
    require_sphere(id, "the extrinsic mean");
    return SubsetEstimator::ExtrinsicMean;
  }
  return id.kind == ManifoldKind::Sphere ? SubsetEstimator::IntrinsicMeanFixedPoint
                                         : SubsetEstimator::IntrinsicMeanGradient;
}

EstimatorReport estimate(std::span<const Point> points, SubsetEstimator estimator,
                         const SolverConfig& config) {
  switch (estimator) {
    case SubsetEstimator::IntrinsicMeanFixedPoint:
      return intrinsic_mean_sphere(points, config);
    case SubsetEstimator::IntrinsicMeanGradient:
      return intrinsic_mean_gradient(points, config);
    case SubsetEstimator::ExtrinsicMean: return extrinsic_mean(points);
  }
  throw Error(ErrorKind::ConfigError, "unknown subset estimator");
}

MomResult median_of_means(std::span<const Point> points,
                          const SubsetPartition& groups,
                          SubsetEstimator subset_estimator,
                          MetricKind median_kind, const SolverConfig& config,
                          Execution execution) {
  config.validate();
  const std::size_t m = groups.groups.size();
  if (m == 0) throw Error(ErrorKind::InvalidGroupCount, "empty partition");
  for (const auto& g : groups.groups) {
    for (std::size_t i : g) {
      if (i >= points.size()) {
        throw Error(ErrorKind::InvalidGroupCount, "partition index out of range");
      }
    }
  }

  std::vector<std::optional<Point>> estimates(m);
  std::vector<std::exception_ptr> failures(m);
  const bool parallel = execution == Execution::Parallel && m > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(m); ++j) {
    try {
      const auto& idx = groups.groups[static_cast<std::size_t>(j)];
      if (idx.empty()) continue;
      std::vector<Point> subset;
      subset.reserve(idx.size());
      for (std::size_t i : idx) subset.push_back(points[i]);
      estimates[static_cast<std::size_t>(j)] =
          subset.size() == 1 ? subset.front()
                             : estimate(subset, subset_estimator, config).estimate;
    } catch (...) {
      failures[static_cast<std::size_t>(j)] = std::current_exception();
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!failures[j]) continue;
    try {
      std::rethrow_exception(failures[j]);
    } catch (const Error& e) {
      throw Error(e.kind(), "group " + std::to_string(j) + ": " + e.what(),
                  static_cast<int>(j));
    }
  }

  MomResult result{EstimatorReport{points.front()}, {}, groups};
  for (auto& e : estimates) {
    if (e) result.subset_estimates.push_back(std::move(*e));
  }
  result.median = median_kind == MetricKind::Intrinsic
                      ? intrinsic_median(result.subset_estimates, config)
                      : extrinsic_median(result.subset_estimates, config);
  return result;
}

MomResult median_of_means(std::span<const Point> points, std::size_t m,
                          SubsetEstimator subset_estimator,
                          MetricKind median_kind, const SolverConfig& config,
                          Execution execution) {
  const std::vector<std::size_t> order = canonical_order(points);
  SubsetPartition groups = partition(points.size(), m, config.seed);
  for (auto& g : groups.groups) {
    for (std::size_t& i : g) i = order[i];
    std::sort(g.begin(), g.end());
  }
  return median_of_means(points, groups, subset_estimator, median_kind, config,
                         execution);
}

}  // namespace mom
