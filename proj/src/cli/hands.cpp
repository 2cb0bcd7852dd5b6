#include <random>

#include "mom/cli/experiment.hpp"
#include "mom/random.hpp"

namespace mom::cli {

namespace {

std::vector<Point> aligned_to(const Point& ref, const std::vector<Point>& shapes) {
  std::vector<Point> out;
  out.reserve(shapes.size());
  for (const Point& s : shapes) {
    out.push_back(Point::planar_shape(shape::align(ref.coords(), s.coords())));
  }
  return out;
}

}  // namespace

HandsResult run_hands(const ExperimentConfig& config, const LandmarkDataset& data) {
  config.validate();
  if (data.shapes.empty()) throw Error(ErrorKind::DegenerateInput, "empty landmark dataset");
  const int k = config.outlier_counts.front();
  const int m = config.group_counts.front();
  const int landmarks = data.landmarks;

  std::vector<Point> contaminated = data.shapes;
  Rng rng = make_rng(derive_seed(config.seed, 1));
  std::uniform_real_distribution<double> ab(0.5, 1.0);
  for (int i = 0; i < k; ++i) {
    const double a = ab(rng);
    const double b = ab(rng);
    contaminated.push_back(ellipse_shape(a, b, landmarks));
  }
  if (static_cast<std::size_t>(m) > contaminated.size()) {
    throw Error(ErrorKind::ConfigError, "more groups than shapes");
  }

  SolverConfig solver = config.solver;
  solver.seed = derive_seed(config.seed, 2);
  MomResult mom =
      median_of_means(contaminated, static_cast<std::size_t>(m),
                      SubsetEstimator::IntrinsicMeanGradient, MetricKind::Intrinsic, solver,
                      config.threads == 1 ? Execution::Serial : Execution::Parallel);
  Point sample_mean = intrinsic_mean_gradient(contaminated, config.solver).estimate;
  Point clean_mean = intrinsic_mean_gradient(data.shapes, config.solver).estimate;
  const double mean_to_clean = distance(sample_mean, clean_mean);
  const double median_to_clean = distance(mom.median.estimate, clean_mean);
  HandsResult out{std::move(contaminated), std::move(mom.partition),
                  std::move(mom.subset_estimates), std::move(sample_mean),
                  mom.median.estimate, std::move(clean_mean), mean_to_clean,
                  median_to_clean, {}};

  const std::string prefix = config.output_path.empty() ? "hands" : config.output_path;
  const Point& ref = out.clean_mean;

  std::vector<Point> by_group;
  std::string labels = "groups=";
  for (std::size_t j = 0; j < out.partition.groups.size(); ++j) {
    for (std::size_t i : out.partition.groups[j]) {
      by_group.push_back(out.contaminated[i]);
      labels += (labels.size() > 7 ? "," : "") + std::to_string(j);
    }
  }
  const std::string source = "source=" + data.source;
  out.files = {prefix + "_contaminated.csv", prefix + "_subsets.csv",
               prefix + "_subset_means.csv", prefix + "_estimates.csv"};
  write_landmarks(out.files[0], aligned_to(ref, out.contaminated),
                  {source, "rows 1-" + std::to_string(data.shapes.size()) +
                               " clean, remaining rows ellipse outliers"});
  write_landmarks(out.files[1], aligned_to(ref, by_group), {source, labels});
  write_landmarks(out.files[2], aligned_to(ref, out.subset_means),
                  {source, "one subset mean per row"});
  write_landmarks(out.files[3], aligned_to(ref, {out.sample_mean, out.mom_median}),
                  {source, "row 1 sample Frechet mean, row 2 median of subset means"});
  return out;
}

}  // namespace mom::cli
