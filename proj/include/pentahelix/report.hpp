#pragma once

#include <string>
#include <vector>

#include "pentahelix/classify.hpp"
#include "pentahelix/frenet.hpp"

namespace pentahelix::io {

/// Provenance attached to a serialized analysis.
struct ReportProvenance {
  std::string input_path;
  std::uint64_t input_hash = 0;
  bool reparametrized = false;
};

/// Deterministic JSON rendering of a full analysis: fixed key order, numbers
/// at 17 significant digits. Identical inputs produce identical bytes.
std::string report_to_json(const classify::HelixReport& report,
                           const ReportProvenance& provenance,
                           Eigen::Index samples);

/// One line per flag, e.g. "v1 true (residual 1.2e-09 <= tol 1e-06)".
std::string report_summary(const classify::HelixReport& report);

/// Column names plotdata understands for a given report.
std::vector<std::string> plot_series_names();

/// Columnar table of s plus the requested series. Throws ParseError on an
/// unknown name, Error("SeriesUnavailable") when the series needs an axis
/// the curve did not earn.
std::string plot_table(const frenet::FrenetData& fd,
                       const classify::HelixReport& report,
                       const std::vector<std::string>& series);

}  // namespace pentahelix::io
