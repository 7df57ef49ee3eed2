#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pentahelix/classify.hpp"
#include "pentahelix/curve_file.hpp"
#include "pentahelix/report.hpp"
#include "pentahelix/synthesis.hpp"

using namespace pentahelix;

namespace {

std::filesystem::path scratch_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pentahelix_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

frenet::CurveSamples small_w_curve() {
  synthesis::WCurveSpec spec;
  spec.k << 1, 2, 3, 4;
  return synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 5.0, 1e-3));
}

}  // namespace

TEST_CASE("format_number round trips doubles exactly") {
  for (const double v : {0.1, 1.0 / 3.0, 123456.789e-11, -2.5e300, 0.0,
                         std::sqrt(2.0), 80.0 / 9.0}) {
    CHECK(std::stod(io::format_number(v)) == v);
  }
}

TEST_CASE("curve file round trip is lossless") {
  const auto curve = small_w_curve();
  const auto path = scratch_file("round_trip.curve");
  io::write_curve_file(path, curve.grid->s(), curve.points, true,
                       {"unit_speed_residual 0"});
  const io::CurveFile file = io::read_curve_file(path);
  CHECK(file.arclength);
  CHECK(file.param.size() == curve.grid->size());
  CHECK((file.points - curve.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((file.param - curve.grid->s()).abs().maxCoeff() == 0.0);
}

TEST_CASE("curve file parse errors") {
  const auto path = scratch_file("bad.curve");

  {
    std::ofstream out(path);
    out << "# dimension 4\n# parametrization arclength\n";
    for (int i = 0; i < 8; ++i) out << i << " 0 0 0 0 0\n";
  }
  CHECK_THROWS_AS(io::read_curve_file(path), io::ParseError);

  {
    std::ofstream out(path);
    out << "# dimension 5\n# parametrization arclength\n";
    for (int i = 0; i < 8; ++i) out << i << " 0 0 0 0\n";  // 5 columns
  }
  CHECK_THROWS_AS(io::read_curve_file(path), io::ParseError);

  {
    std::ofstream out(path);
    out << "# dimension 5\n";  // missing parametrization
    for (int i = 0; i < 8; ++i) out << i << " 0 0 0 0 0\n";
  }
  CHECK_THROWS_AS(io::read_curve_file(path), io::ParseError);

  {
    std::ofstream out(path);
    out << "# dimension 5\n# parametrization arclength\n";
    out << "0 0 0 0 0 0\n0 0 0 0 0 0\n";  // not increasing
    for (int i = 0; i < 6; ++i) out << i + 1 << " 0 0 0 0 0\n";
  }
  CHECK_THROWS_AS(io::read_curve_file(path), io::ParseError);
}

TEST_CASE("raw files get resampled") {
  const auto curve = small_w_curve();
  const auto path = scratch_file("raw.curve");
  io::write_curve_file(path, curve.grid->s(), curve.points, /*arclength=*/false);
  const io::CurveFile file = io::read_curve_file(path);
  CHECK_FALSE(file.arclength);
  bool reparametrized = false;
  const auto samples = io::to_samples(file, &reparametrized);
  CHECK(reparametrized);
  CHECK(samples.jets.empty());
  CHECK(std::abs(samples.grid->back() - curve.grid->back()) <= 1e-7);
}

TEST_CASE("curvature expression language") {
  const io::CurvatureExpressions exprs = io::CurvatureExpressions::parse(
      {"1+0.3*sin(s)", "2*k1", "2+3*2^2", "-(k3/13)+s"});
  CHECK(exprs.eval(0, 0.5) == doctest::Approx(1.0 + 0.3 * std::sin(0.5)));
  CHECK(exprs.eval(1, 0.5) == doctest::Approx(2.0 * (1.0 + 0.3 * std::sin(0.5))));
  CHECK(exprs.eval(2, 0.0) == doctest::Approx(14.0));
  CHECK(exprs.eval(3, 2.0) == doctest::Approx(-14.0 / 13.0 + 2.0));

  CHECK_THROWS_AS(io::CurvatureExpressions::parse({"k1", "1", "1", "1"}),
                  io::ParseError);  // self reference
  CHECK_THROWS_AS(io::CurvatureExpressions::parse({"k2", "1", "1", "1"}),
                  io::ParseError);  // forward reference
  CHECK_THROWS_AS(io::CurvatureExpressions::parse({"1+", "1", "1", "1"}),
                  io::ParseError);
  CHECK_THROWS_AS(io::CurvatureExpressions::parse({"foo(s)", "1", "1", "1"}),
                  io::ParseError);
}

TEST_CASE("report JSON is deterministic and lossless on key values") {
  const auto curve = small_w_curve();
  const auto report = classify::classify_all(curve);
  io::ReportProvenance prov;
  prov.input_path = "mem";
  prov.input_hash = io::fnv1a64("mem");
  const std::string a = io::report_to_json(report, prov, curve.grid->size());
  const std::string b = io::report_to_json(report, prov, curve.grid->size());
  CHECK(a == b);
  CHECK(a.find("\"v1\"") != std::string::npos);
  CHECK(a.find("\"sigma_min_v2\"") != std::string::npos);
  CHECK(a.find("\"cos_angle\"") != std::string::npos);
}

TEST_CASE("plot table: flat series and unknown names") {
  const auto curve = small_w_curve();
  const auto fd = frenet::extract_frames(curve);
  const auto report = classify::classify_all(curve);

  const std::string table = io::plot_table(fd, report, {"ratio21", "F"});
  std::istringstream lines(table);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "# s ratio21 F");
  double s, ratio, F;
  double min_ratio = 1e300, max_ratio = -1e300;
  double worst_f = 0.0;
  while (lines >> s >> ratio >> F) {
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    worst_f = std::max(worst_f, std::abs(F - 0.390625));
  }
  CHECK(max_ratio - min_ratio <= 1e-6 * std::max(1.0, max_ratio));
  CHECK(worst_f <= 1e-5);

  CHECK_THROWS_AS(io::plot_table(fd, report, {"nope"}), io::ParseError);
}
