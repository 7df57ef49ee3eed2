#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <iostream>

#include "pentahelix/verify.hpp"

// Runs the full acceptance suite once and asserts every criterion. The
// rendered report (one pass/fail line per criterion) goes to stdout so a
// failing criterion is visible in the test log.
TEST_CASE("acceptance suite") {
  const pentahelix::verify::SuiteOutcome outcome =
      pentahelix::verify::run_acceptance({});
  std::cout << outcome.report_text;
  for (const auto& c : outcome.criteria) {
    INFO(c.id, ". ", c.name, " [", c.detail, "]");
    CHECK(c.pass);
  }
  CHECK(outcome.all_pass);
}
