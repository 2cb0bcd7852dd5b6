// Serial reference against the OpenMP kernels: median of means over groups,
// RPGA group covariances and the mSSR projection sweep.

#include <benchmark/benchmark.h>

#include "mom/estimators.hpp"
#include "mom/pga.hpp"
#include "mom/samplers.hpp"

using namespace mom;

namespace {

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

const std::vector<Point>& sphere_sample() {
  static const std::vector<Point> pts = [] {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(8);
    mu[7] = 1.0;
    return sample_vmf({Point::sphere(mu), 20.0}, 4000, 1);
  }();
  return pts;
}

const std::vector<Point>& spd_sample() {
  static const std::vector<Point> pts = [] {
    SpdLogNormalParams p;
    p.kappa = 0.05;
    p.sigma = Eigen::VectorXd::LinSpaced(6, 1.0, 20.0).asDiagonal();
    return sample_spd_lognormal(p, 240, 2);
  }();
  return pts;
}

void BM_MedianOfMeans(benchmark::State& state) {
  const auto& pts = sphere_sample();
  SolverConfig cfg;
  cfg.seed = 7;
  for (auto _ : state) {
    const MomResult r = median_of_means(pts, 40, SubsetEstimator::IntrinsicMeanFixedPoint,
                                        MetricKind::Intrinsic, cfg, execution_of(state));
    benchmark::DoNotOptimize(r.median.objective);
  }
}
BENCHMARK(BM_MedianOfMeans)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Rpga(benchmark::State& state) {
  const auto& pts = spd_sample();
  RpgaConfig cfg;
  cfg.solver.seed = 3;
  cfg.execution = execution_of(state);
  for (auto _ : state) {
    const TangentBasis b = rpga(pts, 24, 3, cfg);
    benchmark::DoNotOptimize(b.eigenvalues.data());
  }
}
BENCHMARK(BM_Rpga)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Mssr(benchmark::State& state) {
  const auto& pts = spd_sample();
  const TangentBasis basis = pga(pts, intrinsic_mean_gradient(pts).estimate, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mssr(pts, basis, 2, {}, execution_of(state)));
  }
}
BENCHMARK(BM_Mssr)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
