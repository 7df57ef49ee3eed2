#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "pentahelix/frenet.hpp"
#include "pentahelix/types.hpp"

namespace pentahelix::io {

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error("ParseError", w) {}
};

/// Plain-text curve container: '#' comment header carrying the dimension and
/// parametrization tags, then six numeric columns (parameter + five
/// coordinates), monotone in the first column.
struct CurveFile {
  bool arclength = true;
  Eigen::ArrayXd param;
  Mat5X points;
};

CurveFile read_curve_file(const std::filesystem::path& path);

/// Writes the standard header plus any extra comment lines, then the rows.
/// Numbers carry 17 significant digits so reading back is lossless.
void write_curve_file(const std::filesystem::path& path, const Eigen::ArrayXd& param,
                      const Mat5X& points, bool arclength,
                      const std::vector<std::string>& extra_comments = {});

/// Curve samples from a loaded file; raw-parameter files are resampled onto
/// an arc-length grid first. Sets `reparametrized` accordingly.
frenet::CurveSamples to_samples(const CurveFile& file, bool* reparametrized = nullptr);

/// 17-significant-digit decimal form, the lossless double round trip.
std::string format_number(double v);

/// FNV-1a 64-bit content hash, reported in analysis provenance.
std::uint64_t fnv1a64(const std::string& bytes);

/// Expression-defined curvature profiles for the synth CLI: arithmetic on
/// s, the constants, sin/cos/..., and references to lower-numbered k's.
class CurvatureExpressions {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  static CurvatureExpressions parse(const std::array<std::string, 4>& sources);
  double eval(int index, double s) const;
  std::function<double(double)> function(int index) const;

 private:
  std::array<NodePtr, 4> roots_;
};

}  // namespace pentahelix::io
