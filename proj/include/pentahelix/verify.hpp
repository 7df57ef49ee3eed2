#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pentahelix::verify {

struct VerifyOptions {
  double tol = 1e-6;           // constancy tolerance driving classification
  std::uint64_t seed = 20260810;  // seed for the random curve draws
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteOutcome {
  std::vector<CriterionResult> criteria;
  std::string report_text;  // deterministic rendering, one line per criterion
  bool all_pass = false;
};

/// Runs every acceptance criterion. The pipeline is executed twice so the
/// determinism criterion can compare full rendered reports byte for byte.
SuiteOutcome run_acceptance(const VerifyOptions& options = {});

}  // namespace pentahelix::verify
