#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mom/bounds.hpp"
#include "mom/cli/experiment.hpp"
#include "mom/random.hpp"
#include "mom/samplers.hpp"

using namespace mom;
using namespace mom::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mom_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

ErrorKind load_error(const fs::path& p, std::string* message = nullptr) {
  try {
    load_landmarks(p.string());
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  return ErrorKind::ConfigError;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(MOM_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("landmark files") {
  SUBCASE("a row of zeros is degenerate") {
    std::string row = "0";
    for (int i = 1; i < 144; ++i) row += ",0";
    const auto p = write_file("zeros.csv", "# landmarks=72\n" + row + "\n");
    CHECK(load_error(p) == ErrorKind::DegenerateShape);
  }

  SUBCASE("unit square") {
    const auto p = write_file("square.csv", "# landmarks=4\n0,0,1,0,1,1,0,1\n");
    const LandmarkDataset d = load_landmarks(p.string());
    REQUIRE(d.shapes.size() == 1);
    CHECK(d.landmarks == 4);
    const Eigen::VectorXd& z = d.shapes[0].coords();
    CHECK(z.norm() == doctest::Approx(1.0).epsilon(1e-15));
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k < 4; ++k) {
      cx += z[2 * k];
      cy += z[2 * k + 1];
    }
    CHECK(std::abs(cx) < 1e-15);
    CHECK(std::abs(cy) < 1e-15);
  }

  SUBCASE("round trip") {
    Rng rng = make_rng(3);
    std::normal_distribution<double> g;
    std::vector<Point> shapes;
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd z(2 * 9);
      for (auto& v : z) v = g(rng);
      shapes.push_back(Point::planar_shape(shape::to_preshape(z)));
    }
    const auto p = scratch("roundtrip.csv");
    write_landmarks(p.string(), shapes, {"round trip"});
    const LandmarkDataset d = load_landmarks(p.string());
    REQUIRE(d.shapes.size() == shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      CHECK((d.shapes[i].coords() - shapes[i].coords()).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }

  SUBCASE("parse errors name the row and column") {
    std::string msg;
    auto p = write_file("bad.csv", "# landmarks=3\n0,0,1,0,0,1\n0,1,x,0,1,1\n");
    CHECK(load_error(p, &msg) == ErrorKind::ParseError);
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);

    p = write_file("short.csv", "# landmarks=3\n0,0,1,0,1\n");
    CHECK(load_error(p) == ErrorKind::ParseError);
    p = write_file("noheader.csv", "0,0,1,0,0,1\n");
    CHECK(load_error(p) == ErrorKind::ParseError);
    CHECK(load_error(scratch("missing.csv")) == ErrorKind::ParseError);
  }
}

TEST_CASE("experiment configuration") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::Sim1);
  CHECK(c.n == 60);
  CHECK(c.kappa == 30.0);
  CHECK(c.runs == 200);
  CHECK(ExperimentConfig::defaults(Experiment::Sim1, true).runs == 1000);
  CHECK(ExperimentConfig::defaults(Experiment::Sim4, true).runs == 1200);
  CHECK(ExperimentConfig::defaults(Experiment::Sim5).runs == 100);
  CHECK(ExperimentConfig::defaults(Experiment::Sim2).group_counts.back() == 200);
  CHECK(ExperimentConfig::defaults(Experiment::Sim3).metric == MetricKind::Extrinsic);

  c.group_counts = {61};
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig::defaults(Experiment::Sim4);
  c.metric = MetricKind::Extrinsic;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(parse_experiment("sim9"), Error);
  CHECK(parse_experiment("sim3") == Experiment::Sim3);
}

TEST_CASE("simulation harness") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::Sim1);
  c.runs = 4;
  c.outlier_counts = {5};
  c.group_counts = {1, 60};

  SUBCASE("m = 1 is the sample mean and m = n the sample median") {
    const ResultTable t = run_experiment(c);
    const Point mu = Point::sphere(Eigen::Vector3d(0, 0, 1));
    for (int r = 0; r < c.runs; ++r) {
      const std::uint64_t seed_k = derive_seed(derive_seed(c.seed, r), 5);
      const VmfParams p{mu, c.kappa};
      std::vector<Point> pts = sample_vmf(p, 55, derive_seed(seed_k, 0));
      const auto extra = sample_outlier(p, c.confidence_level, 5, derive_seed(seed_k, 1),
                                        c.outlier_mode);
      pts.insert(pts.end(), extra.begin(), extra.end());
      CHECK(t.at(5, 1).rho_mom_samples[r] == distance(intrinsic_mean_sphere(pts).estimate, mu));
      CHECK(t.at(5, 60).rho_mom_samples[r] == distance(intrinsic_median(pts).estimate, mu));
    }
    CHECK(t.at(5, 1).rho_mom_mean == t.at(5, 1).rho_submean_mean);
  }

  SUBCASE("a single-point sample") {
    c.n = 1;
    c.outlier_counts = {0};
    c.group_counts = {1};
    const ResultTable t = run_experiment(c);
    CHECK(t.cells.size() == 1);
    CHECK(t.cells[0].runs == c.runs);
  }

  SUBCASE("output does not depend on the thread count") {
    c.group_counts = {1, 5, 30};
    c.threads = 1;
    const std::string one = run_experiment(c).to_csv();
    c.threads = 3;
    CHECK(run_experiment(c).to_csv() == one);
    CHECK(one.rfind("k,m,rho_mom_mean,rho_mom_se,rho_submean_mean,rho_submean_se,runs,failures\n",
                    0) == 0);
  }

  SUBCASE("rpga harness") {
    ExperimentConfig s = ExperimentConfig::defaults(Experiment::Sim5);
    s.runs = 2;
    s.outlier_counts = {0, 10};
    s.group_counts = {10};
    s.threads = 1;
    const MssrTable a = run_rpga_experiment(s);
    s.threads = 2;
    const MssrTable b = run_rpga_experiment(s);
    CHECK(a.to_csv() == b.to_csv());
    for (int k : {0, 10}) {
      for (const char* method : {"PGA", "RPGA"}) {
        const int m = std::string(method) == "PGA" ? 1 : 10;
        CHECK(a.at(k, method, m, 3).mssr_mean <= a.at(k, method, m, 1).mssr_mean + 1e-8);
      }
    }
  }
}

TEST_CASE("hand study") {
  const auto raw = synthetic_hands(6, 24, 11);
  std::vector<Point> shapes;
  for (const auto& z : raw) shapes.push_back(Point::planar_shape(shape::to_preshape(z)));
  const auto data_path = scratch("hands6.csv");
  write_landmarks(data_path.string(), shapes);
  const LandmarkDataset data = load_landmarks(data_path.string());

  ExperimentConfig c = ExperimentConfig::defaults(Experiment::Hands);
  c.output_path = scratch("hands6").string();
  c.outlier_counts = {0};
  c.group_counts = {1};
  const HandsResult r = run_hands(c, data);
  CHECK(distance(r.mom_median, r.sample_mean) < 1e-12);
  CHECK(r.files.size() == 4);
  const std::vector<std::size_t> sizes = {6, 6, 1, 2};
  for (std::size_t i = 0; i < r.files.size(); ++i) {
    CHECK(load_landmarks(r.files[i]).shapes.size() == sizes[i]);
  }
}

TEST_CASE("bounds planning table") {
  BoundsConfig b;
  b.base = ExperimentConfig::defaults(Experiment::Sim1);
  b.base.group_counts = {10};
  b.alphas = {1e-9, 0.3, 0.6};
  b.epsilon = 0.5;
  b.second_moment_draws = 20000;
  const BoundsReport r = report_bounds(b);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].c_alpha == doctest::Approx(r.lipschitz_K).epsilon(1e-8));
  CHECK(r.rows[1].status == "ok");
  CHECK(r.rows[1].bound ==
        doctest::Approx(bounds::theorem_bound(10, 0.3, r.rows[1].eta)).epsilon(1e-15));
  CHECK(r.rows[2].status == "inadmissible");
  // E theta^2 of a vMF(kappa = 30) on S^2 is about 2 / kappa.
  CHECK(r.second_moment == doctest::Approx(2.0 / 30.0).epsilon(0.05));

  b.epsilon = 1e-3;
  const BoundsReport v = report_bounds(b);
  CHECK(v.rows[1].eta == 1.0);
  CHECK(v.rows[1].status == "vacuous");
}

TEST_CASE("command-line exit codes") {
  CHECK(run_tool("") == 2);
  CHECK(run_tool("sim --experiment nope --out -") == 2);
  CHECK(run_tool("sim --experiment sim1 --groups 61 --out -") == 2);
  CHECK(run_tool("sim --experiment sim1 --runs 2 --outliers 0 --groups 1,5 --out -") == 0);
  const auto bad = write_file("cli_bad.csv", "# landmarks=2\n0,0,1\n");
  CHECK(run_tool("sim --experiment hands --data " + bad.string() + " --out " +
                 scratch("cli_hands").string()) == 3);
  CHECK(run_tool("bounds --alpha-grid 0.3 --epsilon 0.5 --draws 1000") == 0);
  CHECK(run_tool("bounds --alpha-grid 0.3") == 2);
}
