// Command-line front end: `sim`, `bounds` and `make-hands`.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mom/cli/experiment.hpp"

using namespace mom;
using namespace mom::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRun = 1;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, path + ": cannot open for writing");
  out << text;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::DegenerateShape:
    case ErrorKind::DegenerateInput:
      return kExitData;
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidGroupCount:
    case ErrorKind::UnsupportedMetric:
    case ErrorKind::InadmissibleAlpha:
    case ErrorKind::DomainError:
    case ErrorKind::GroupTooSmall:
      return kExitConfig;
    default:
      return kExitRun;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Median-of-means estimation on manifolds: simulations and bounds"};
  app.require_subcommand(1);

  // sim
  auto* sim = app.add_subcommand("sim", "run a simulation and write its table");
  std::string experiment;
  int runs = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool full = false;
  std::string metric;
  std::vector<int> groups, outliers, dims;
  int threads = 0;
  std::string data_path = MOM_DEFAULT_HANDS;
  double kappa = 0.0;
  std::string outlier_mode;
  double radius_factor = 0.0;
  std::string coords = "whitened";
  sim->add_option("--experiment", experiment, "sim1|sim2|sim3|sim4|sim5|hands")->required();
  sim->add_option("--runs", runs, "replicates (default 200; 100 for sim5)");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out, "output CSV (hands: file prefix); '-' for stdout");
  sim->add_flag("--full", full, "full replicate counts (1000/1200/200)");
  sim->add_option("--metric", metric, "intrinsic|extrinsic (sphere experiments)");
  sim->add_option("--groups", groups, "group counts m")->delimiter(',');
  sim->add_option("--outliers", outliers, "outlier counts k")->delimiter(',');
  sim->add_option("--dims", dims, "sim5 submanifold dimensions")->delimiter(',');
  sim->add_option("--threads", threads, "worker threads (capped by MOM_THREADS)");
  sim->add_option("--data", data_path, "hands: landmark CSV");
  sim->add_option("--kappa", kappa, "override the concentration / scale");
  sim->add_option("--outlier-mode", outlier_mode, "conditional|uniform (default uniform)");
  sim->add_option("--radius-factor", radius_factor,
                  "SPD uniform outliers: radius drawn from [r, factor * r]");
  sim->add_option("--coords", coords, "sim5 tangent coordinates: whitened|raw");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Chebyshev / concentration planning table");
  std::string b_experiment = "sim1";
  std::vector<double> alphas;
  double epsilon = 0.0;
  double psi_bar = 0.0;
  std::vector<int> b_groups;
  std::uint64_t b_seed = 1;
  int draws = 100000;
  std::string b_out;
  bnd->add_option("--experiment", b_experiment, "distribution: sim1|sim2|sim3|sim4");
  bnd->add_option("--alpha-grid", alphas, "alpha values")->delimiter(',')->required();
  bnd->add_option("--epsilon", epsilon, "deviation radius epsilon")->required();
  bnd->add_option("--psi-bar", psi_bar, "worst-case embedding angle (extrinsic; default 0)");
  bnd->add_option("--groups", b_groups, "group counts m")->delimiter(',');
  bnd->add_option("--seed", b_seed, "Monte Carlo seed");
  bnd->add_option("--draws", draws, "Monte Carlo draws for the second moment");
  bnd->add_option("--out", b_out, "output CSV; default stdout");

  // make-hands
  auto* mk = app.add_subcommand("make-hands", "write the synthetic hand outline dataset");
  std::string h_out;
  std::uint64_t h_seed = 1997;
  int h_count = 18, h_landmarks = 72;
  mk->add_option("--out", h_out, "landmark CSV path")->required();
  mk->add_option("--seed", h_seed, "generator seed");
  mk->add_option("--count", h_count, "number of hands");
  mk->add_option("--landmarks", h_landmarks, "landmarks per hand");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) {
      const Experiment e = parse_experiment(experiment);
      ExperimentConfig cfg = ExperimentConfig::defaults(e, full);
      cfg.seed = seed;
      cfg.output_path = out;
      cfg.threads = threads;
      if (runs > 0) cfg.runs = runs;
      if (!metric.empty()) cfg.metric = parse_metric(metric);
      if (!groups.empty()) cfg.group_counts = groups;
      if (!outliers.empty()) cfg.outlier_counts = outliers;
      if (!dims.empty()) cfg.dims = dims;
      if (kappa > 0.0) cfg.kappa = kappa;
      if (radius_factor != 0.0) cfg.spd_radius_factor = radius_factor;
      if (outlier_mode == "uniform") {
        cfg.outlier_mode = OutlierMode::UniformBeyondRadius;
      } else if (outlier_mode == "conditional") {
        cfg.outlier_mode = OutlierMode::ConditionalTail;
      } else if (!outlier_mode.empty()) {
        throw Error(ErrorKind::ConfigError, "unknown outlier mode '" + outlier_mode + "'");
      }
      if (coords == "raw") {
        cfg.coordinates = CoordinateMode::Raw;
      } else if (coords != "whitened") {
        throw Error(ErrorKind::ConfigError, "unknown coordinates '" + coords + "'");
      }

      if (e == Experiment::Hands) {
        const LandmarkDataset data = load_landmarks(data_path);
        const HandsResult r = run_hands(cfg, data);
        std::cout << "shapes," << r.contaminated.size() << "\n"
                  << "groups," << r.partition.groups.size() << "\n"
                  << "mean_to_clean," << r.mean_to_clean << "\n"
                  << "median_to_clean," << r.median_to_clean << "\n";
        for (const auto& f : r.files) std::cout << "wrote," << f << "\n";
      } else if (e == Experiment::Sim5) {
        const MssrTable t = run_rpga_experiment(cfg);
        for (int m : t.skipped_groups) {
          std::cerr << "warning: m=" << m << " leaves groups below 2 points; reported as PGA only\n";
        }
        emit(out, t.to_csv());
      } else {
        emit(out, run_experiment(cfg).to_csv());
      }
    } else if (*bnd) {
      BoundsConfig cfg;
      cfg.base = ExperimentConfig::defaults(parse_experiment(b_experiment));
      cfg.base.seed = b_seed;
      if (!b_groups.empty()) cfg.base.group_counts = b_groups;
      cfg.alphas = alphas;
      cfg.epsilon = epsilon;
      cfg.psi_bar = psi_bar;
      cfg.second_moment_draws = draws;
      const BoundsReport r = report_bounds(cfg);
      std::cerr << "second_moment=" << r.second_moment << " K=" << r.lipschitz_K
                << (cfg.base.metric == MetricKind::Extrinsic
                        ? " psi_bar=" + std::to_string(psi_bar) + " (caller-supplied)"
                        : std::string())
                << "\n";
      emit(b_out, r.to_csv());
    } else if (*mk) {
      std::vector<Point> shapes;
      for (const auto& z : synthetic_hands(h_count, h_landmarks, h_seed)) {
        shapes.push_back(Point::planar_shape(shape::to_preshape(z)));
      }
      write_landmarks(h_out, shapes,
                      {"synthetic open-hand outlines, generated by `mom make-hands --seed " +
                       std::to_string(h_seed) + "`",
                       "landmarks equally spaced in arc length, starting at the wrist"});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
