#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pentahelix/classify.hpp"
#include "pentahelix/curve_file.hpp"
#include "pentahelix/numkit.hpp"
#include "pentahelix/report.hpp"
#include "pentahelix/synthesis.hpp"
#include "pentahelix/verify.hpp"

namespace {

using namespace pentahelix;

double default_tolerance() {
  if (const char* env = std::getenv("PENTAHELIX_TOL")) {
    try {
      const double v = std::stod(env);
      if (v > 0.0) return v;
    } catch (const std::exception&) {
      // fall through to the built-in default
    }
  }
  return 1e-6;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct SynthArgs {
  std::string kind;
  std::vector<double> constants;
  std::array<std::string, 4> exprs;
  std::string profile_file;
  std::vector<double> range{0.0, 10.0};
  double step = 1e-3;
  std::string output;
};

frenet::CurveSamples profile_from_samples(const std::string& path, double s0,
                                          double s1, double step);

int cmd_synth(const SynthArgs& args) {
  if (!(args.step > 0.0) || !(args.range[1] > args.range[0])) {
    std::cerr << "error: --range needs s1 > s0 and --step must be positive\n";
    return 2;
  }
  frenet::CurveSamples curve;
  if (args.kind == "w") {
    if (args.constants.size() != 4) {
      std::cerr << "error: synth w needs exactly four curvature constants\n";
      return 2;
    }
    synthesis::WCurveSpec spec;
    for (int i = 0; i < 4; ++i) {
      spec.k(i) = args.constants[static_cast<std::size_t>(i)];
    }
    curve = synthesis::synthesize_w_curve(
        spec, Grid::uniform(args.range[0], args.range[1], args.step));
  } else if (args.kind == "profile") {
    if (!args.profile_file.empty()) {
      curve = profile_from_samples(args.profile_file, args.range[0], args.range[1],
                                   args.step);
    } else {
      const io::CurvatureExpressions exprs = io::CurvatureExpressions::parse(args.exprs);
      synthesis::CurvatureSpec spec;
      for (int i = 0; i < 4; ++i) spec.k[static_cast<std::size_t>(i)] = exprs.function(i);
      spec.s0 = args.range[0];
      spec.s1 = args.range[1];
      spec.step = args.step;
      curve = synthesis::synthesize_from_curvatures(spec);
    }
  } else {
    std::cerr << "error: unknown synth kind '" << args.kind << "' (use w|profile)\n";
    return 2;
  }

  const ConstancyVerdict speed = frenet::check_unit_speed(curve, 1e-6);
  io::write_curve_file(args.output, curve.grid->s(), curve.points,
                       /*arclength=*/true,
                       {"unit_speed_residual " + io::format_number(speed.residual)});
  std::cout << "wrote " << args.output << " (" << curve.grid->size()
            << " rows, unit-speed residual " << io::format_number(speed.residual)
            << ")\n";
  return 0;
}

frenet::CurveSamples profile_from_samples(const std::string& path, double s0,
                                          double s1, double step) {
  // Five columns: s k1 k2 k3 k4 on a uniform grid covering [s0, s1].
  std::ifstream in(path);
  if (!in) throw io::ParseError("cannot open profile file " + path);
  std::vector<std::array<double, 5>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::array<double, 5> vals{};
    for (int c = 0; c < 5; ++c) {
      if (!(row >> vals[static_cast<std::size_t>(c)])) {
        throw io::ParseError("profile file needs 5 numeric columns (s k1..k4)");
      }
    }
    rows.push_back(vals);
  }
  if (rows.size() < 7) throw io::ParseError("profile file needs at least 7 rows");
  Eigen::ArrayXd s(static_cast<Eigen::Index>(rows.size()));
  std::array<Eigen::ArrayXd, 4> k;
  for (auto& arr : k) arr.resize(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s(i) = rows[static_cast<std::size_t>(i)][0];
    for (int c = 0; c < 4; ++c) {
      k[static_cast<std::size_t>(c)](i) = rows[static_cast<std::size_t>(i)]
                                              [static_cast<std::size_t>(c + 1)];
    }
  }
  const Grid sample_grid{s};  // validates uniform spacing
  if (s0 < s(0) - 1e-12 || s1 > s(s.size() - 1) + 1e-12) {
    throw io::ParseError("profile samples do not cover the requested range");
  }

  synthesis::CurvatureSpec spec;
  spec.s0 = s0;
  spec.s1 = s1;
  spec.step = step;
  const double h = sample_grid.step();
  for (int c = 0; c < 4; ++c) {
    const Eigen::ArrayXd values = k[static_cast<std::size_t>(c)];
    const Eigen::ArrayXd deriv = numkit::differentiate_values(values, h, 1);
    const double front = s(0);
    const Eigen::Index n = s.size();
    spec.k[static_cast<std::size_t>(c)] = [values, deriv, front, h, n](double x) {
      // Cubic Hermite between the two bracketing samples.
      const double pos = (x - front) / h;
      Eigen::Index seg = std::clamp<Eigen::Index>(
          static_cast<Eigen::Index>(std::floor(pos)), 0, n - 2);
      const double u = std::clamp(pos - static_cast<double>(seg), 0.0, 1.0);
      const double p0 = values(seg), p1 = values(seg + 1);
      const double d0 = h * deriv(seg), d1 = h * deriv(seg + 1);
      const double u2 = u * u, u3 = u2 * u;
      return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * d0 +
             (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * d1;
    };
  }
  return synthesis::synthesize_from_curvatures(spec);
}

struct AnalyzeArgs {
  std::string input;
  double tol = 1e-6;
  std::string json_out;
  std::string expect;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const io::CurveFile file = io::read_curve_file(args.input);
  bool reparametrized = false;
  const frenet::CurveSamples curve = io::to_samples(file, &reparametrized);

  Tolerances config;
  config.constancy = args.tol;
  const classify::HelixReport report = classify::classify_all(curve, config);

  io::ReportProvenance prov;
  prov.input_path = args.input;
  prov.input_hash = io::fnv1a64(read_bytes(args.input));
  prov.reparametrized = reparametrized;

  if (reparametrized) {
    std::cout << "input was raw-parametrized; resampled to arc length ("
              << curve.grid->size() << " nodes, step "
              << io::format_number(curve.grid->step()) << ")\n";
  }
  std::cout << "jets: " << to_string(report.provenance)
            << ", effective tolerance " << io::format_number(report.tolerance)
            << "\n";
  std::cout << io::report_summary(report);

  if (!args.json_out.empty()) {
    std::ofstream out(args.json_out, std::ios::binary);
    out << io::report_to_json(report, prov, curve.grid->size());
    if (!out) {
      std::cerr << "error: cannot write " << args.json_out << "\n";
      return 2;
    }
  }

  if (!args.expect.empty()) {
    bool want_v1 = false, want_v3 = false, want_v5 = false;
    std::istringstream list(args.expect);
    std::string item;
    while (std::getline(list, item, ',')) {
      if (item == "v1") want_v1 = true;
      else if (item == "v3") want_v3 = true;
      else if (item == "v5") want_v5 = true;
      else {
        std::cerr << "error: unknown expectation '" << item << "'\n";
        return 2;
      }
    }
    if (want_v1 != report.v1_pass || want_v3 != report.v3.pass ||
        want_v5 != report.v5.pass) {
      std::cerr << "expectation mismatch: got v1=" << report.v1_pass
                << " v3=" << report.v3.pass << " v5=" << report.v5.pass << "\n";
      return 1;
    }
  }
  return 0;
}

struct PlotArgs {
  std::string input;
  std::string series;
  std::string output;
  double tol = 1e-6;
};

int cmd_plotdata(const PlotArgs& args) {
  const io::CurveFile file = io::read_curve_file(args.input);
  const frenet::CurveSamples curve = io::to_samples(file);
  Tolerances config;
  config.constancy = args.tol;
  const frenet::FrenetData fd = frenet::extract_frames(curve, config.unit_speed);
  const classify::HelixReport report = classify::classify_all(curve, config);

  std::vector<std::string> names;
  std::istringstream list(args.series);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  if (names.empty()) {
    std::cerr << "error: --series is empty\n";
    return 2;
  }
  const std::string table = io::plot_table(fd, report, names);
  std::ofstream out(args.output, std::ios::binary);
  out << table;
  if (!out) {
    std::cerr << "error: cannot write " << args.output << "\n";
    return 2;
  }
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct VerifyArgs {
  double tol = 1e-6;
  std::uint64_t seed = 20260810;
  std::string suite = "default";
  std::string out;
};

int cmd_verify(const VerifyArgs& args) {
  if (args.suite != "default") {
    std::cerr << "error: unknown suite '" << args.suite << "' (only: default)\n";
    return 2;
  }
  verify::VerifyOptions options;
  options.tol = args.tol;
  options.seed = args.seed;
  const verify::SuiteOutcome outcome = verify::run_acceptance(options);
  std::cout << outcome.report_text;
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    out << outcome.report_text;
    if (!out) {
      std::cerr << "error: cannot write " << args.out << "\n";
      return 2;
    }
  }
  return outcome.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unit-speed curves in E^5: synthesis, Frenet analysis, helix classification"};
  app.require_subcommand(1);
  const double tol_default = default_tolerance();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a test curve");
  synth_cmd->add_option("kind", synth.kind, "w | profile")->required();
  synth_cmd->add_option("constants", synth.constants,
                        "four curvature constants (kind w)");
  synth_cmd->add_option("--k1", synth.exprs[0], "curvature expression in s");
  synth_cmd->add_option("--k2", synth.exprs[1], "curvature expression (may use k1)");
  synth_cmd->add_option("--k3", synth.exprs[2], "curvature expression");
  synth_cmd->add_option("--k4", synth.exprs[3], "curvature expression");
  synth_cmd->add_option("--profile-file", synth.profile_file,
                        "sampled profile file (s k1 k2 k3 k4)");
  synth_cmd->add_option("--range", synth.range, "arc-length range s0 s1")
      ->expected(2);
  synth_cmd->add_option("--step", synth.step, "grid step");
  synth_cmd->add_option("-o,--output", synth.output, "output curve file")
      ->required();

  AnalyzeArgs analyze;
  analyze.tol = tol_default;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "classify a curve file");
  analyze_cmd->add_option("input", analyze.input, "curve file")->required();
  analyze_cmd->add_option("--tol", analyze.tol, "constancy tolerance");
  analyze_cmd->add_option("--json", analyze.json_out, "write the JSON report here");
  analyze_cmd->add_option("--expect", analyze.expect,
                          "comma list of expected flags, e.g. v1,v3,v5");

  PlotArgs plot;
  plot.tol = tol_default;
  CLI::App* plot_cmd = app.add_subcommand("plotdata", "emit plot-ready columns");
  plot_cmd->add_option("input", plot.input, "curve file")->required();
  plot_cmd->add_option("--series", plot.series, "comma list of series names")
      ->required();
  plot_cmd->add_option("-o,--output", plot.output, "output table file")->required();
  plot_cmd->add_option("--tol", plot.tol, "constancy tolerance");

  VerifyArgs verify_args;
  verify_args.tol = tol_default;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--suite", verify_args.suite, "criterion set (default)");
  verify_cmd->add_option("--tol", verify_args.tol, "constancy tolerance");
  verify_cmd->add_option("--seed", verify_args.seed, "random draw seed");
  verify_cmd->add_option("--out", verify_args.out, "write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*analyze_cmd) return cmd_analyze(analyze);
    if (*plot_cmd) return cmd_plotdata(plot);
    if (*verify_cmd) return cmd_verify(verify_args);
  } catch (const pentahelix::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pentahelix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == "ParseError" ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
