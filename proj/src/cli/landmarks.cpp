#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mom/cli/experiment.hpp"
#include "mom/random.hpp"

namespace mom::cli {

namespace {

[[noreturn]] void parse_error(const std::string& path, int row, int column,
                              const std::string& what) {
  throw Error(ErrorKind::ParseError, path + ": row " + std::to_string(row) + ", column " +
                                         std::to_string(column) + ": " + what);
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

}  // namespace

LandmarkDataset load_landmarks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open file");
  LandmarkDataset data;
  data.source = path;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text[0] == '#') {
      const std::string body = trim(std::string_view(text).substr(1));
      if (body.rfind("landmarks=", 0) == 0) {
        const std::string value = body.substr(10);
        int k = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
        if (ec != std::errc() || ptr != value.data() + value.size() || k < 3) {
          parse_error(path, row, 1, "bad landmark count '" + value + "'");
        }
        data.landmarks = k;
      }
      continue;
    }
    if (data.landmarks == 0) parse_error(path, row, 1, "missing '# landmarks=K' header");

    Eigen::VectorXd z(2 * data.landmarks);
    int column = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      const std::string field =
          trim(std::string_view(text).substr(start, comma == std::string::npos
                                                        ? std::string::npos
                                                        : comma - start));
      ++column;
      if (column > z.size()) {
        parse_error(path, row, column,
                    "expected " + std::to_string(z.size()) + " values, found more");
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        parse_error(path, row, column, "not a finite number: '" + field + "'");
      }
      z[column - 1] = v;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (column != z.size()) {
      parse_error(path, row, column,
                  "expected " + std::to_string(z.size()) + " values, found " +
                      std::to_string(column));
    }
    try {
      data.shapes.push_back(Point::planar_shape(shape::to_preshape(z)));
    } catch (const Error& e) {
      throw Error(e.kind(), path + ": row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (data.landmarks == 0) throw Error(ErrorKind::ParseError, path + ": empty file");
  return data;
}

void write_landmarks(const std::string& path, const std::vector<Point>& shapes,
                     const std::vector<std::string>& comments) {
  if (shapes.empty()) throw Error(ErrorKind::DegenerateInput, "no shapes to write");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, path + ": cannot open for writing");
  out << "# landmarks=" << shapes.front().manifold().param << "\n";
  for (const std::string& c : comments) out << "# " << c << "\n";
  char buf[32];
  for (const Point& s : shapes) {
    const Eigen::VectorXd& z = s.coords();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", z[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorKind::ConfigError, path + ": write failed");
}

// Outline of an open hand: five fingers as rounded strips on a palm, the
// closed polygon resampled to equal arc length. Finger spread, length and
// width vary per hand, plus small landmark noise.
std::vector<Eigen::VectorXd> synthetic_hands(int count, int landmarks, std::uint64_t seed) {
  struct Finger {
    double bx, by, angle_deg, length, width;
  };
  const Finger fingers[] = {
      {0.38, 1.00, 78, 0.60, 0.17},   // little
      {0.13, 1.05, 86, 0.82, 0.19},   // ring
      {-0.12, 1.07, 93, 0.90, 0.20},  // middle
      {-0.36, 1.02, 101, 0.80, 0.19}, // index
      {-0.50, 0.45, 145, 0.62, 0.22}, // thumb
  };
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::VectorXd> hands;
  for (int h = 0; h < count; ++h) {
    std::vector<Eigen::Vector2d> poly;
    const double palm = 1.0 + 0.04 * g(rng);
    poly.emplace_back(-0.45 * palm, 0.0);
    poly.emplace_back(0.45 * palm, 0.0);
    for (const Finger& f : fingers) {
      const double a = (f.angle_deg + 5.0 * g(rng)) * std::numbers::pi / 180.0;
      const double len = f.length * (1.0 + 0.06 * g(rng));
      const double w = 0.5 * f.width * (1.0 + 0.05 * g(rng));
      const Eigen::Vector2d base(f.bx * palm, f.by);
      const Eigen::Vector2d dir(std::cos(a), std::sin(a));
      const Eigen::Vector2d right(std::sin(a), -std::cos(a));
      poly.push_back(base + w * right);
      poly.push_back(base + len * dir + w * right);
      for (int i = 1; i < 4; ++i) {  // rounded tip
        const double t = std::numbers::pi * i / 4.0;
        poly.push_back(base + len * dir + w * (std::cos(t) * right + std::sin(t) * dir));
      }
      poly.push_back(base + len * dir - w * right);
      poly.push_back(base - w * right);
    }
    // Resample the closed polygon at equal arc length.
    std::vector<double> cum{0.0};
    for (std::size_t i = 0; i < poly.size(); ++i) {
      cum.push_back(cum.back() + (poly[(i + 1) % poly.size()] - poly[i]).norm());
    }
    Eigen::VectorXd z(2 * landmarks);
    std::size_t seg = 0;
    for (int k = 0; k < landmarks; ++k) {
      const double s = cum.back() * k / landmarks;
      while (cum[seg + 1] < s) ++seg;
      const double t = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
      const Eigen::Vector2d p =
          (1 - t) * poly[seg] + t * poly[(seg + 1) % poly.size()];
      z[2 * k] = p.x() + 0.004 * g(rng);
      z[2 * k + 1] = p.y() + 0.004 * g(rng);
    }
    hands.push_back(z);
  }
  return hands;
}

}  // namespace mom::cli
