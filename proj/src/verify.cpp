#include "pentahelix/verify.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "pentahelix/classify.hpp"
#include "pentahelix/curve_file.hpp"
#include "pentahelix/frenet.hpp"
#include "pentahelix/numkit.hpp"
#include "pentahelix/synthesis.hpp"

namespace pentahelix::verify {

namespace {

using classify::HelixReport;
using frenet::CurveSamples;
using frenet::FrenetData;
using io::format_number;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  // Fixed mapping instead of std::uniform_real_distribution, whose stream is
  // implementation-defined; reports must be reproducible everywhere.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct Fixture {
  std::string name;
  CurveSamples curve;
  FrenetData fd;
  HelixReport report;
  bool random_w = false;
  bool named_w = false;
};

// Only the rendered text and verdicts survive a pass; the fixtures (a few
// hundred MB of frames and axes across the suite) are freed on return.
struct PassResult {
  std::vector<CriterionResult> criteria;
  std::string text;
};

CurveSamples make_w(const Vec4& k, double s1 = 10.0) {
  synthesis::WCurveSpec spec;
  spec.k = k;
  return synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, s1, 1e-3));
}

CurveSamples make_profile(std::function<double(double)> k1,
                          std::function<double(double)> k2,
                          std::function<double(double)> k3,
                          std::function<double(double)> k4, double s1 = 10.0) {
  synthesis::CurvatureSpec spec;
  spec.k = {std::move(k1), std::move(k2), std::move(k3), std::move(k4)};
  spec.s0 = 0.0;
  spec.s1 = s1;
  spec.step = 1e-3;
  return synthesis::synthesize_from_curvatures(spec);
}

std::vector<Fixture> build_fixtures(const VerifyOptions& opt) {
  std::vector<Fixture> out;
  const Tolerances config{opt.tol};

  const auto add = [&](std::string name, CurveSamples curve, bool random_w,
                       bool named_w) {
    Fixture f;
    f.name = std::move(name);
    f.fd = frenet::extract_frames(curve);
    f.report = classify::classify_all(curve, config);
    f.curve = std::move(curve);
    f.random_w = random_w;
    f.named_w = named_w;
    out.push_back(std::move(f));
  };

  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < 20; ++i) {
    Vec4 k;
    for (int j = 0; j < 4; ++j) k(j) = uniform(rng, 0.5, 5.0);
    std::ostringstream name;
    name << "w_random_" << i << "(" << format_number(k(0)) << ","
         << format_number(k(1)) << "," << format_number(k(2)) << ","
         << format_number(k(3)) << ")";
    add(name.str(), make_w(k), true, false);
  }

  Vec4 k;
  k << 1, 2, 3, 4;
  add("w_1234", make_w(k), false, true);
  k << 1, 1, 1, 1;
  add("w_1111", make_w(k), false, true);
  k << 2.5, 0.7, 1.3, 3.1;
  add("w_fixed", make_w(k), false, true);

  add("sinusoidal_v3",
      make_profile([](double s) { return 1.0 + 0.3 * std::sin(s); },
                   [](double s) { return 2.0 * (1.0 + 0.3 * std::sin(s)); },
                   [](double s) { return 1.0 + 0.3 * std::cos(s); },
                   [](double s) { return 2.0 * (1.0 + 0.3 * std::cos(s)); },
                   2.0 * M_PI),
      false, false);

  // Tangent helix with genuinely varying k1: with w^2 = k3^2 + k4^2 the
  // profile k1 = r0 + (k3 e / w)(1 - cos(w s)) keeps the characterization
  // function constant while k1 oscillates.
  {
    const double w = std::sqrt(2.0);
    const double eps = 0.3;
    add("v1_family",
        make_profile(
            [w, eps](double s) { return 1.0 + (eps / w) * (1.0 - std::cos(w * s)); },
            [](double) { return 1.0; }, [](double) { return 1.0; },
            [](double) { return 1.0; }),
        false, false);
  }

  // V5 slant helix that is not V3: rho = k4/k3 varies, and k1 is chosen so
  // the constancy function stays pinned at 4 (so cos(angle) = 1/sqrt(1+4)).
  add("v5_family",
      make_profile(
          [](double s) {
            const double rho = 1.0 + 0.3 * std::sin(s);
            const double f = 0.3 * std::cos(s);
            return 1.0 / std::sqrt(4.0 - f * f - rho * rho);
          },
          [](double) { return 1.0; }, [](double) { return 1.0; },
          [](double s) { return 1.0 + 0.3 * std::sin(s); }),
      false, false);

  add("drift_ratio21",
      make_profile([](double) { return 1.0; },
                   [](double s) { return 1.0 + 0.2 * s; },
                   [](double) { return 1.0; }, [](double) { return 1.0; }),
      false, false);
  add("drift_ratio43",
      make_profile([](double) { return 1.0; }, [](double) { return 1.0; },
                   [](double) { return 1.0; },
                   [](double s) { return 1.0 + 0.2 * s; }),
      false, false);
  add("wobble_k1",
      make_profile([](double s) { return 1.0 + 0.5 * std::sin(s); },
                   [](double) { return 1.0; }, [](double) { return 1.0; },
                   [](double) { return 1.0; }),
      false, false);
  add("drift_k3",
      make_profile([](double) { return 1.0; }, [](double) { return 1.0; },
                   [](double s) { return 1.0 + 0.15 * s; },
                   [](double) { return 1.0; }),
      false, false);
  add("wobble_two",
      make_profile([](double s) { return 1.0 + 0.3 * std::sin(s); },
                   [](double) { return 1.0; },
                   [](double s) { return 1.0 + 0.3 * std::cos(s); },
                   [](double) { return 1.0; }),
      false, false);
  return out;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

PassResult run_pass(const VerifyOptions& opt) {
  PassResult pass;
  const std::vector<Fixture> fx = build_fixtures(opt);
  std::vector<CriterionResult>& crit = pass.criteria;

  const auto find = [&](const std::string& name) -> const Fixture& {
    for (const auto& f : fx) {
      if (f.name == name) return f;
    }
    throw Error("Internal", "fixture " + name + " missing");
  };

  // 1. Frame fidelity on the random constant-curvature curves.
  {
    bool ok = true;
    double worst_defect = 0.0, worst_residual = 0.0;
    for (const auto& f : fx) {
      if (!f.random_w) continue;
      const double defect = frenet::orthonormality_defect(f.fd);
      const double residual = frenet::frenet_equation_residual(f.fd).maxCoeff();
      worst_defect = std::max(worst_defect, defect);
      worst_residual = std::max(worst_residual, residual);
      ok = ok && defect <= 1e-8 && residual <= 1e-4;
    }
    crit.push_back({1, "frame fidelity (20 random constant-curvature curves)", ok,
                    "orthonormality<=" + format_number(worst_defect) +
                        " frenet_residual<=" + format_number(worst_residual)});
  }

  // 2. Curvature round trip through synthesis and extraction.
  {
    const Fixture& f = find("sinusoidal_v3");
    double worst = 0.0;
    const Eigen::Index n = f.fd.grid->size();
    for (int i = 0; i < 4; ++i) {
      const auto& recovered = f.fd.k(i + 1).values;
      const auto& truth =
          f.curve.prescribed_curvature[static_cast<std::size_t>(i)];
      const auto rel =
          ((recovered - truth) / truth.abs().max(1e-30)).abs().segment(2, n - 4);
      worst = std::max(worst, rel.maxCoeff());
    }
    const bool ok = worst <= 1e-4;
    crit.push_back({2, "curvature round trip (sinusoidal profile)", ok,
                    "max_rel_error=" + format_number(worst)});
  }

  // 3. Every random constant-curvature curve classifies as all three helix
  //    kinds with every residual within tolerance.
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& f : fx) {
      if (!f.random_w) continue;
      const HelixReport& r = f.report;
      ok = ok && r.v1_pass && r.v3.pass && r.v5.pass && r.v1_axis.has_value() &&
           r.v3_axis.has_value() && r.v5_axis.has_value();
      if (!ok) break;
      for (const double residual :
           {r.v1_verdict.residual, r.v3.ratio21.residual, r.v3.ratio34.residual,
            r.v5.g_verdict.residual, r.v5.integrated.residual,
            r.v1_ode.integrated.residual, r.v1_integral.residual,
            r.v1_axis->residual, r.v3_axis->residual, r.v5_axis->residual}) {
        worst = std::max(worst, residual);
      }
      ok = ok && worst <= opt.tol;
    }
    crit.push_back({3, "triple classification of constant-curvature curves", ok,
                    "worst_residual=" + format_number(worst)});
  }

  // 4. Frozen axis angles for k = (1,2,3,4).
  {
    const Fixture& f = find("w_1234");
    const HelixReport& r = f.report;
    bool ok = r.v1_axis && r.v3_axis && r.v5_axis;
    std::string detail = "axes missing";
    if (ok) {
      const double c1 = r.v1_axis->cos_angle;
      const double c3 = r.v3_axis->cos_angle;
      const double c5 = r.v5_axis->cos_angle;
      ok = std::abs(c1 - 0.848000) <= 1e-5 && std::abs(c3 - 0.424000) <= 1e-5 &&
           std::abs(c5 - 0.317999) <= 1e-5;
      for (const auto* axis : {&*r.v1_axis, &*r.v3_axis, &*r.v5_axis}) {
        ok = ok && axis->residual <= 1e-6 && axis->derivative_max <= 1e-5;
      }
      detail = "cos=(" + format_number(c1) + "," + format_number(c3) + "," +
               format_number(c5) + ")";
    }
    crit.push_back({4, "axis angles for k=(1,2,3,4)", ok, detail});
  }

  // 5. The equivalent characterizations agree on helix and non-helix curves.
  {
    const Tolerances agree_tol{1e-4};
    const char* names[10] = {"w_1234",        "w_1111",     "w_fixed",
                             "v1_family",     "sinusoidal_v3", "drift_ratio21",
                             "drift_ratio43", "wobble_k1",  "drift_k3",
                             "v5_family"};
    bool ok = true;
    std::string breaker;
    for (const char* name : names) {
      const Fixture& f = find(name);
      HelixReport r;
      try {
        r = classify::classify_all(f.curve, agree_tol);
      } catch (const Error& e) {
        ok = false;
        breaker = std::string(name) + " threw " + e.kind();
        break;
      }
      const bool v1_agree = r.v1_verdict.is_constant == r.v1_ode.pass &&
                            r.v1_ode.pass == r.v1_integral.pass;
      const bool v5_agree =
          r.v5.g_verdict.is_constant == r.v5.integrated.is_constant;
      if (!(v1_agree && v5_agree)) {
        ok = false;
        breaker = std::string(name) + " disagrees (v1 " +
                  std::to_string(r.v1_verdict.is_constant) +
                  std::to_string(r.v1_ode.pass) +
                  std::to_string(r.v1_integral.pass) + ")";
        break;
      }
    }
    crit.push_back({5, "characterization equivalence on 10 curves", ok,
                    ok ? "unanimous at tol 1e-4" : breaker});
  }

  // 6. Axis orthogonality structure.
  {
    bool ok = true;
    double worst = 0.0;
    for (const auto& f : fx) {
      const HelixReport& r = f.report;
      if (r.v3_axis) {
        const Vec5 u = r.v3_axis->mean_axis;
        worst = std::max(worst, (u.transpose() * f.fd.V(2)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (u.transpose() * f.fd.V(4)).cwiseAbs().maxCoeff());
      }
      if (r.v5_axis) {
        const Vec5 u = r.v5_axis->mean_axis;
        worst = std::max(worst, (u.transpose() * f.fd.V(4)).cwiseAbs().maxCoeff());
      }
    }
    ok = worst <= opt.tol;
    crit.push_back({6, "axis orthogonality structure", ok,
                    "max_inner_product=" + format_number(worst)});
  }

  // 7. V5 slant with constant k4/k3 forces k2/k1 constant.
  {
    bool ok = true;
    int applicable = 0;
    double worst = 0.0;
    for (const auto& f : fx) {
      if (!f.report.implication_residual) continue;
      ++applicable;
      const ConstancyVerdict v = numkit::constancy(
          ScalarSeries(f.fd.grid, f.fd.k(2).values / f.fd.k(1).values), 1e-5);
      worst = std::max(worst, v.residual);
      ok = ok && v.is_constant;
    }
    crit.push_back({7, "ratio implication on V5 slant curves", ok,
                    std::to_string(applicable) +
                        " applicable, worst_residual=" + format_number(worst)});
  }

  // 8. Nonexistence gap for V2/V4 axis systems.
  {
    bool ok = true;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& f : fx) {
      smallest = std::min({smallest, f.report.nonexistence.sigma_min_v2,
                           f.report.nonexistence.sigma_min_v4});
    }
    ok = smallest >= 1e-3;
    crit.push_back({8, "nonexistence gap sigma_min over the suite", ok,
                    "min_sigma=" + format_number(smallest) +
                        " (unit-norm residual floor 1e-4 implied)"});
  }

  // 9. Negative controls fail loudly.
  {
    const Fixture& f = find("drift_ratio21");
    const HelixReport& r = f.report;
    const bool ok = !r.v3.pass && r.v3.ratio21.residual >= 10.0 * opt.tol &&
                    !r.v5.pass && r.v5.integrated.residual >= 10.0 * opt.tol &&
                    r.v5.differential_max >= 10.0 * opt.tol;
    crit.push_back(
        {9, "negative control rejection margins", ok,
         "ratio21_residual=" + format_number(r.v3.ratio21.residual) +
             " v5_differential=" + format_number(r.v5.differential_max)});
  }

  std::ostringstream text;
  for (const auto& c : crit) {
    text << pass_fail(c.pass) << "  " << c.id << ". " << c.name << "  ["
         << c.detail << "]\n";
  }
  pass.text = text.str();
  return pass;
}

}  // namespace

SuiteOutcome run_acceptance(const VerifyOptions& options) {
  SuiteOutcome outcome;
  const PassResult first = run_pass(options);
  const PassResult second = run_pass(options);

  outcome.criteria = first.criteria;
  const bool deterministic = first.text == second.text;
  outcome.criteria.push_back({10, "byte-identical reruns", deterministic,
                              deterministic ? "two full passes rendered identically"
                                            : "renders differ"});

  std::ostringstream text;
  text << "pentahelix acceptance suite\n";
  text << "seed " << options.seed << "\n";
  text << "tolerance " << format_number(options.tol) << "\n";
  text << first.text;
  const auto& c10 = outcome.criteria.back();
  text << pass_fail(c10.pass) << "  " << c10.id << ". " << c10.name << "  ["
       << c10.detail << "]\n";

  outcome.all_pass = true;
  int passed = 0;
  for (const auto& c : outcome.criteria) {
    outcome.all_pass = outcome.all_pass && c.pass;
    passed += c.pass ? 1 : 0;
  }
  text << "summary " << passed << "/" << outcome.criteria.size() << " criteria passed\n";
  outcome.report_text = text.str();
  return outcome;
}

}  // namespace pentahelix::verify
