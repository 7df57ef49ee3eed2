#include "pentahelix/curve_file.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pentahelix::io {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

CurveFile read_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  CurveFile file;
  bool have_dimension = false;
  bool have_tag = false;
  std::vector<std::array<double, 6>> rows;
  std::string line;
  Eigen::Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string word;
      hdr >> word;
      if (word == "dimension") {
        int d = 0;
        hdr >> d;
        if (d != 5) {
          throw ParseError("dimension tag must be 5, got " + std::to_string(d));
        }
        have_dimension = true;
      } else if (word == "parametrization") {
        std::string tag;
        hdr >> tag;
        if (tag == "arclength") {
          file.arclength = true;
        } else if (tag == "raw") {
          file.arclength = false;
        } else {
          throw ParseError("unknown parametrization tag '" + tag + "'");
        }
        have_tag = true;
      }
      continue;
    }
    std::istringstream row(line);
    std::array<double, 6> vals{};
    for (int c = 0; c < 6; ++c) {
      if (!(row >> vals[static_cast<std::size_t>(c)])) {
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected 6 numeric columns");
      }
    }
    double extra;
    if (row >> extra) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected exactly 6 numeric columns");
    }
    rows.push_back(vals);
  }
  if (!have_dimension) throw ParseError("missing '# dimension 5' header");
  if (!have_tag) throw ParseError("missing '# parametrization' header");
  if (rows.size() < 7) {
    throw ParseError("curve file needs at least 7 rows, got " +
                     std::to_string(rows.size()));
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  file.param.resize(n);
  file.points.resize(5, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    file.param(i) = r[0];
    for (Eigen::Index c = 0; c < 5; ++c) {
      file.points(c, i) = r[static_cast<std::size_t>(c + 1)];
    }
    if (i > 0 && !(file.param(i) > file.param(i - 1))) {
      throw ParseError("first column must be strictly increasing at row " +
                       std::to_string(i));
    }
  }
  return file;
}

void write_curve_file(const std::filesystem::path& path, const Eigen::ArrayXd& param,
                      const Mat5X& points, bool arclength,
                      const std::vector<std::string>& extra_comments) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << "# pentahelix curve\n";
  out << "# dimension 5\n";
  out << "# parametrization " << (arclength ? "arclength" : "raw") << "\n";
  out << "# columns " << (arclength ? "s" : "t") << " x1 x2 x3 x4 x5\n";
  for (const auto& c : extra_comments) out << "# " << c << "\n";
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    out << format_number(param(i));
    for (Eigen::Index r = 0; r < 5; ++r) out << ' ' << format_number(points(r, i));
    out << '\n';
  }
  if (!out) throw ParseError("write to " + path.string() + " failed");
}

frenet::CurveSamples to_samples(const CurveFile& file, bool* reparametrized) {
  if (reparametrized) *reparametrized = !file.arclength;
  if (!file.arclength) {
    return frenet::reparametrize_arclength(file.param, file.points);
  }
  frenet::CurveSamples out;
  out.grid = std::make_shared<Grid>(file.param);
  out.points = file.points;
  return out;
}

}  // namespace pentahelix::io
