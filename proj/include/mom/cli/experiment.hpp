#pragma once

// Experiment harness: seeded replicate loops for the sphere and SPD
// simulations, the RPGA study, the hand-shape study and the bound planning
// table. Replicates run concurrently; every replicate's result is stored
// and reduced in index order, so output does not depend on thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "mom/estimators.hpp"
#include "mom/pga.hpp"
#include "mom/samplers.hpp"

namespace mom::cli {

enum class Experiment { Sim1, Sim2, Sim3, Sim4, Sim5, Hands };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& text);

struct ExperimentConfig {
  Experiment experiment = Experiment::Sim1;
  std::size_t n = 60;
  double kappa = 30.0;
  std::vector<int> outlier_counts;
  std::vector<int> group_counts;
  int runs = 200;
  std::uint64_t seed = 1;
  MetricKind metric = MetricKind::Intrinsic;
  std::string output_path;

  double confidence_level = 0.95;
  OutlierMode outlier_mode = OutlierMode::ConditionalTail;
  double spd_radius_factor = 2.0;  // SPD uniform outliers: radius in [r, f r]
  CoordinateMode coordinates = CoordinateMode::Whitened;  // Sim5
  std::vector<int> dims{1, 2, 3};                         // Sim5
  int threads = 0;  // 0: MOM_THREADS or the OpenMP default
  SolverConfig solver;

  /// Reference settings with desk-scale run counts (full counts when `full`).
  static ExperimentConfig defaults(Experiment e, bool full = false);
  /// Throws ConfigError.
  void validate() const;
};

/// Worker count actually used: `requested` if positive, else MOM_THREADS,
/// else the OpenMP default; always capped by MOM_THREADS when it is set.
int resolve_threads(int requested);

struct Cell {
  int k = 0;
  int m = 1;
  double rho_mom_mean = 0.0;
  double rho_mom_se = 0.0;
  double rho_submean_mean = 0.0;
  double rho_submean_se = 0.0;
  int runs = 0;
  int failures = 0;
  /// Per-replicate values in replicate order; NaN where the run failed.
  std::vector<double> rho_mom_samples;
  std::vector<double> rho_submean_samples;
};

struct ResultTable {
  Experiment experiment = Experiment::Sim1;
  std::vector<Cell> cells;  // k-major, then m, in config order

  const Cell& at(int k, int m) const;
  std::string to_csv() const;
};

/// Sim1-Sim4: for each replicate and each k, n - k clean draws plus k
/// outliers; for each m, the median of subset estimates mu* and the subset
/// estimates mu_j. Records rho(mu*, mu) and mean_j rho(mu_j, mu).
ResultTable run_experiment(const ExperimentConfig& config);

struct MssrCell {
  int k = 0;
  std::string method;  // "PGA" or "RPGA"
  int m = 1;           // 1 for PGA
  int dim = 1;
  double mssr_mean = 0.0;
  double mssr_se = 0.0;
  int runs = 0;
  int failures = 0;
  std::vector<double> samples;  // per replicate; NaN where it failed
};

struct MssrTable {
  std::vector<MssrCell> cells;  // k-major, then method/m, then dim
  /// Falls back to PGA entries for m that would leave singleton groups.
  std::vector<int> skipped_groups;

  const MssrCell& at(int k, const std::string& method, int m, int dim) const;
  std::string to_csv() const;
};

/// Sim5: PGA at the Frechet mean of the contaminated sample and RPGA for
/// each m; mSSR of the clean points against each fitted submanifold.
MssrTable run_rpga_experiment(const ExperimentConfig& config);

struct LandmarkDataset {
  std::vector<Point> shapes;
  int landmarks = 0;
  std::string source;
};

/// Rows of 2K reals x1,y1,...,xK,yK after a `# landmarks=K` header; other
/// `#` lines are comments. Shapes are centered and scaled on load. Throws
/// ParseError (with row/column) and DegenerateShape.
LandmarkDataset load_landmarks(const std::string& path);
void write_landmarks(const std::string& path, const std::vector<Point>& shapes,
                     const std::vector<std::string>& comments = {});

struct HandsResult {
  std::vector<Point> contaminated;  // clean shapes followed by the outliers
  SubsetPartition partition;
  std::vector<Point> subset_means;
  Point sample_mean;    // Frechet mean of the contaminated sample
  Point mom_median;     // median of the subset means
  Point clean_mean;     // Frechet mean of the clean shapes
  double mean_to_clean = 0.0;
  double median_to_clean = 0.0;
  std::vector<std::string> files;
};

/// Adds `outlier_counts[0]` ellipse outliers (a, b ~ U[0.5, 1]), splits into
/// `group_counts[0]` random subsets and writes four landmark files under the
/// output prefix: contaminated sample, sample by subset, subset means, and
/// the mean and median. Shapes are rotated onto the clean mean for plotting.
HandsResult run_hands(const ExperimentConfig& config, const LandmarkDataset& data);

/// Deterministic stand-in for an 18-hand, 72-landmark outline dataset.
std::vector<Eigen::VectorXd> synthetic_hands(int count, int landmarks, std::uint64_t seed);

struct BoundsConfig {
  ExperimentConfig base;          // distribution and n
  std::vector<double> alphas;
  double epsilon = 0.5;
  double psi_bar = 0.0;           // extrinsic case only
  int second_moment_draws = 100000;
};

struct BoundRow {
  int m = 1;
  double alpha = 0.0;
  double eta = 0.0;
  double c_alpha = 0.0;
  double bound = 1.0;
  std::string status;  // "ok", "vacuous", "inadmissible"
};

struct BoundsReport {
  double second_moment = 0.0;
  double lipschitz_K = 1.0;
  std::vector<BoundRow> rows;
  std::string to_csv() const;
};

/// Planning table: for each m in base.group_counts and alpha, the Chebyshev
/// level eta at epsilon (second moment by Monte Carlo from the clean law),
/// C_alpha and exp(-m phi(alpha, eta)).
BoundsReport report_bounds(const BoundsConfig& config);

}  // namespace mom::cli
