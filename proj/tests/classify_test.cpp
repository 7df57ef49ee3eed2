#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <random>

#include "pentahelix/classify.hpp"
#include "pentahelix/frenet.hpp"
#include "pentahelix/numkit.hpp"
#include "pentahelix/synthesis.hpp"

using namespace pentahelix;

namespace {

frenet::FrenetData w_frames(double k1, double k2, double k3, double k4,
                            double s1 = 5.0, double step = 1e-3) {
  synthesis::WCurveSpec spec;
  spec.k << k1, k2, k3, k4;
  return frenet::extract_frames(
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, s1, step)));
}

frenet::CurveSamples profile_curve(std::function<double(double)> k1,
                                   std::function<double(double)> k2,
                                   std::function<double(double)> k3,
                                   std::function<double(double)> k4,
                                   double s1 = 10.0) {
  synthesis::CurvatureSpec spec;
  spec.k = {std::move(k1), std::move(k2), std::move(k3), std::move(k4)};
  spec.s1 = s1;
  return synthesis::synthesize_from_curvatures(spec);
}

frenet::CurveSamples sinusoidal_instance() {
  return profile_curve([](double s) { return 1.0 + 0.3 * std::sin(s); },
                       [](double s) { return 2.0 * (1.0 + 0.3 * std::sin(s)); },
                       [](double s) { return 1.0 + 0.3 * std::cos(s); },
                       [](double s) { return 2.0 * (1.0 + 0.3 * std::cos(s)); },
                       2.0 * M_PI);
}

frenet::CurveSamples v5_family_instance() {
  // rho = k4/k3 varies; k1 keeps the V5 constancy function pinned at 4.
  return profile_curve(
      [](double s) {
        const double rho = 1.0 + 0.3 * std::sin(s);
        const double f = 0.3 * std::cos(s);
        return 1.0 / std::sqrt(4.0 - f * f - rho * rho);
      },
      [](double) { return 1.0; }, [](double) { return 1.0; },
      [](double s) { return 1.0 + 0.3 * std::sin(s); });
}

}  // namespace

TEST_CASE("tangent helix function is 0.390625 for k=(1,2,3,4)") {
  const auto fd = w_frames(1, 2, 3, 4);
  const auto [verdict, funcs] = classify::v1_helix_test(fd, 1e-6);
  CHECK(verdict.is_constant);
  CHECK(verdict.residual <= 1e-6);
  CHECK(verdict.mean == doctest::Approx(0.390625).epsilon(1e-8));

  const auto axis = classify::v1_axis(fd, 1e-5);
  CHECK(axis.cos_angle == doctest::Approx(1.0 / std::sqrt(1.390625)).epsilon(1e-7));
  CHECK(axis.residual <= 1e-6);
  CHECK(axis.angle > 0.0);
  CHECK(axis.angle < M_PI / 2.0);
}

TEST_CASE("equal curvatures weight the axis evenly") {
  const auto fd = w_frames(1, 1, 1, 1);
  const auto axis = classify::v1_axis(fd, 1e-5);
  CHECK(axis.cos_angle == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-7));
  const Eigen::Index mid = fd.grid->size() / 2;
  const Vec5 c = axis.coefficients.col(mid);
  CHECK(c(0) == doctest::Approx(c(2)).epsilon(1e-7));
  CHECK(c(2) == doctest::Approx(c(4)).epsilon(1e-7));
  CHECK(std::abs(c(1)) <= 1e-7);
  CHECK(std::abs(c(3)) <= 1e-7);

  const auto v3axis = classify::v3_axis(fd, 1e-5);
  CHECK(v3axis.cos_angle == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-7));
  const auto v5axis = classify::v5_axis(fd, 1e-5);
  CHECK(v5axis.cos_angle == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-7));
}

TEST_CASE("paired first-order identities hold on constant curvatures") {
  const auto fd = w_frames(1, 2, 3, 4);
  const auto report = classify::v1_ode_check(fd, 1e-6);
  CHECK(report.pass);
  CHECK(report.integrated.residual <= 1e-8);
  // f = k1 k3 / (k2 k4)
  CHECK(report.integrated.mean == doctest::Approx(0.375).epsilon(1e-8));
}

TEST_CASE("integral identity fit: constants and window independence") {
  const auto fd = w_frames(1, 2, 3, 4, 10.0);
  const auto fit = classify::v1_integral_check(fd, 1e-6);
  CHECK(fit.pass);
  CHECK(fit.residual <= 1e-6);
  CHECK(std::abs(fit.A - 0.375) <= 1e-6);
  CHECK(std::abs(fit.B) <= 1e-6);

  const Eigen::Index n = fd.grid->size();
  const auto sub = classify::v1_integral_check(fd, 1e-6, n / 4, 3 * n / 4);
  CHECK(std::abs(sub.A - fit.A) <= 1e-4);
  CHECK(std::abs(sub.B - fit.B) <= 1e-4);
}

TEST_CASE("non-helix wobble fails all three tangent characterizations") {
  const auto fd = frenet::extract_frames(
      profile_curve([](double s) { return 1.0 + 0.5 * std::sin(s); },
                    [](double) { return 1.0; }, [](double) { return 1.0; },
                    [](double) { return 1.0; }));
  const double tol = 1e-4;
  const auto [verdict, funcs] = classify::v1_helix_test(fd, tol);
  CHECK_FALSE(verdict.is_constant);
  CHECK_FALSE(classify::v1_ode_check(fd, tol).pass);
  CHECK_FALSE(classify::v1_integral_check(fd, tol).pass);
}

TEST_CASE("ratio test on constant curvatures: (2, 0.75)") {
  const auto fd = w_frames(1, 2, 3, 4);
  const auto report = classify::v3_slant_test(fd, 1e-6);
  CHECK(report.pass);
  CHECK(report.ratio21.mean == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.ratio34.mean == doctest::Approx(0.75).epsilon(1e-9));

  const auto axis = classify::v3_axis(fd, 1e-5);
  CHECK(axis.cos_angle == doctest::Approx(1.0 / std::sqrt(5.5625)).epsilon(1e-7));
}

TEST_CASE("proportional sinusoidal profile is a v3 slant helix, means (2, 0.5)") {
  const auto fd = frenet::extract_frames(sinusoidal_instance());
  const auto report = classify::v3_slant_test(fd, 1e-6);
  CHECK(report.pass);
  CHECK(report.ratio21.mean == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(report.ratio34.mean == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("linear ratio drift fails the slant test loudly") {
  const auto fd = frenet::extract_frames(
      profile_curve([](double) { return 1.0; },
                    [](double s) { return 1.0 + 0.2 * s; },
                    [](double) { return 1.0; }, [](double) { return 1.0; }));
  const double tol = 1e-6;
  const auto report = classify::v3_slant_test(fd, tol);
  CHECK_FALSE(report.pass);
  CHECK(report.ratio21.residual >= 10.0 * tol);
  const auto v5 = classify::v5_slant_test(fd, tol);
  CHECK_FALSE(v5.pass);
  CHECK(v5.differential_max >= 10.0 * tol);
  CHECK(v5.integrated.residual >= 10.0 * tol);
}

TEST_CASE("a wobbling second curvature fails the ratio test") {
  const auto fd = frenet::extract_frames(
      profile_curve([](double) { return 1.0; },
                    [](double s) { return 1.0 + 0.5 * std::sin(s); },
                    [](double) { return 1.0; }, [](double) { return 1.0; }));
  const auto report = classify::v3_slant_test(fd, 1e-6);
  CHECK_FALSE(report.pass);
  CHECK(report.ratio21.residual > 0.3);
  CHECK(report.ratio21.residual < 0.7);
}

TEST_CASE("a curvature zero on the grid is refused") {
  auto fd = w_frames(1, 2, 3, 4, 5.0, 1e-2);
  fd.curvature[2].values(fd.grid->size() / 2) = 0.0;
  CHECK_THROWS_AS(classify::v1_helix_test(fd, 1e-6), DegenerateCurvature);
  CHECK_THROWS_AS(classify::v3_slant_test(fd, 1e-6), DegenerateCurvature);
  CHECK_THROWS_AS(classify::v5_slant_test(fd, 1e-6), DegenerateCurvature);
}

TEST_CASE("a vanishing integral phase makes the fit ill conditioned") {
  const auto fd = w_frames(1, 1, 1, 1e-9, 10.0);
  CHECK_THROWS_AS(classify::v1_integral_check(fd, 1e-6), IllConditionedFit);
}

TEST_CASE("norm-ratio identities hold unconditionally") {
  for (const auto& fd :
       {w_frames(1, 2, 3, 4), frenet::extract_frames(sinusoidal_instance()),
        frenet::extract_frames(v5_family_instance())}) {
    const auto report = classify::norm_ratio_check(fd, 1e-6);
    CHECK(report.mismatch21 <= 1e-4);
    CHECK(report.mismatch45 <= 1e-4);
    CHECK(report.consistent_with_v3);
  }
  const auto fd = w_frames(1, 2, 3, 4);
  const auto report = classify::norm_ratio_check(fd, 1e-6);
  CHECK(report.mismatch21 <= 1e-5);
  CHECK(report.ratio21_norms.mean == doctest::Approx(std::sqrt(5.0)).epsilon(1e-7));
  CHECK(report.ratio45_norms.mean == doctest::Approx(1.25).epsilon(1e-7));
}

TEST_CASE("fifth-vector slant test on constant curvatures") {
  const auto fd = w_frames(1, 2, 3, 4);
  const auto report = classify::v5_slant_test(fd, 1e-6);
  CHECK(report.pass);
  // The constancy function evaluates to (8/3)^2 + (4/3)^2 = 80/9.
  CHECK(report.g_verdict.mean == doctest::Approx(80.0 / 9.0).epsilon(1e-8));
  CHECK(report.differential_max <= 1e-6);
  const Eigen::Index n = fd.grid->size();
  CHECK(report.functions.f.values.segment(30, n - 60).abs().maxCoeff() <= 1e-8);

  const auto axis = classify::v5_axis(fd, 1e-5);
  CHECK(axis.cos_angle == doctest::Approx(3.0 / std::sqrt(89.0)).epsilon(1e-6));
  CHECK(axis.residual <= 1e-6);
}

TEST_CASE("drifting k4/k3 fails the fifth-vector test") {
  const auto fd = frenet::extract_frames(
      profile_curve([](double) { return 1.0; }, [](double) { return 1.0; },
                    [](double) { return 1.0; },
                    [](double s) { return 1.0 + 0.2 * s; }));
  const auto report = classify::v5_slant_test(fd, 1e-6);
  CHECK_FALSE(report.pass);
  CHECK(report.differential_max > 1e-3);
}

TEST_CASE("varying-ratio V5 instance: slant without being V3") {
  const auto fd = frenet::extract_frames(v5_family_instance());
  const auto v5 = classify::v5_slant_test(fd, 1e-6);
  CHECK(v5.pass);
  CHECK(v5.g_verdict.mean == doctest::Approx(4.0).epsilon(1e-6));
  CHECK_FALSE(classify::v3_slant_test(fd, 1e-6).pass);
  const auto [v1verdict, funcs] = classify::v1_helix_test(fd, 1e-6);
  CHECK_FALSE(v1verdict.is_constant);

  const auto axis = classify::v5_axis(fd, 1e-5);
  // cos(angle) = 1/sqrt(1 + G) with G = 4
  CHECK(axis.cos_angle == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-6));
  // No V4 component in the axis.
  double worst = 0.0;
  for (Eigen::Index c = 0; c < fd.grid->size(); ++c) {
    worst = std::max(worst, std::abs(axis.mean_axis.dot(fd.V(4).col(c))));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("negative k4 classifies through the absolute-value ratios") {
  synthesis::CurvatureSpec spec;
  spec.k = {[](double s) { return 1.0 + 0.3 * std::sin(s); },
            [](double s) { return 2.0 * (1.0 + 0.3 * std::sin(s)); },
            [](double s) { return 1.0 + 0.3 * std::cos(s); },
            [](double s) { return -2.0 * (1.0 + 0.3 * std::cos(s)); }};
  spec.s1 = 2.0 * M_PI;
  const auto curve = synthesis::synthesize_from_curvatures(spec);
  const auto report = classify::classify_all(curve);
  CHECK(report.k4_sign == -1.0);
  CHECK(report.v3.pass);
  CHECK(report.v3.ratio34.mean == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(report.v5.pass);
  CHECK(report.v5.g_verdict.mean == doctest::Approx(20.0).epsilon(1e-6));
  REQUIRE(report.v5_axis.has_value());
  CHECK(report.v5_axis->cos_angle ==
        doctest::Approx(1.0 / std::sqrt(21.0)).epsilon(1e-6));
  CHECK(report.v1_pass);  // squares make the tangent test sign-blind
}

TEST_CASE("implication: V5 slant with constant k4/k3 forces constant k2/k1") {
  const auto fd = frenet::extract_frames(sinusoidal_instance());
  CHECK(classify::v5_slant_test(fd, 1e-6).pass);
  const double residual = classify::v5_implication_check(fd, 1e-5);
  CHECK(residual <= 1e-5);
}

TEST_CASE("every constant-curvature tuple is a V3 slant helix") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> uni(0.5, 5.0);
  for (int trial = 0; trial < 8; ++trial) {
    synthesis::WCurveSpec spec;
    for (int i = 0; i < 4; ++i) spec.k(i) = uni(rng);
    const auto fd = frenet::extract_frames(
        synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 3.0, 1e-3)));
    const auto report = classify::v3_slant_test(fd, 1e-6);
    CHECK(report.pass);
    CHECK(report.ratio21.mean ==
          doctest::Approx(spec.k(1) / spec.k(0)).epsilon(1e-7));
    CHECK(report.ratio34.mean ==
          doctest::Approx(spec.k(2) / spec.k(3)).epsilon(1e-7));
  }
}

TEST_CASE("nonexistence gap on constant curvatures") {
  const auto fd = w_frames(1, 2, 3, 4);
  const auto report = classify::v2_v4_nonexistence_check(fd);
  CHECK(report.sigma_min_v2 >= 0.5);
  CHECK(report.sigma_min_v4 >= 0.5);
}

TEST_CASE("nonexistence sigma_min matches a dense SVD on a coarse grid") {
  const auto fd = w_frames(1.3, 0.9, 2.2, 1.7, 10.0, 0.05);
  for (int which : {2, 4}) {
    const Eigen::SparseMatrix<double> op = classify::nonexistence_operator(fd, which);
    Eigen::MatrixXd dense(op);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    const double sigma_dense = svd.singularValues().tail(1)(0);

    const auto report = classify::v2_v4_nonexistence_check(fd);
    const double sigma_iter =
        which == 2 ? report.sigma_min_v2 : report.sigma_min_v4;
    CHECK(sigma_iter == doctest::Approx(sigma_dense).epsilon(1e-7));
  }
}

TEST_CASE("classify_all on a constant-curvature curve raises every flag") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 2, 3, 4;
  const auto curve =
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 5.0, 1e-3));
  const auto report = classify::classify_all(curve);
  CHECK(report.v1_pass);
  CHECK(report.v3.pass);
  CHECK(report.v5.pass);
  REQUIRE(report.v1_axis.has_value());
  REQUIRE(report.v3_axis.has_value());
  REQUIRE(report.v5_axis.has_value());
  CHECK(std::abs(report.v1_axis->cos_angle - 0.848000) <= 1e-5);
  CHECK(std::abs(report.v3_axis->cos_angle - 0.424000) <= 1e-5);
  CHECK(std::abs(report.v5_axis->cos_angle - 0.317999) <= 1e-5);
  CHECK(report.implication_residual.has_value());
  CHECK(report.k4_sign == 1.0);
}

TEST_CASE("classify_all tags the failing stage") {
  frenet::CurveSamples circle;
  circle.grid = std::make_shared<Grid>(Grid::uniform(0.0, 5.0, 1e-3));
  const Eigen::Index n = circle.grid->size();
  circle.points.resize(5, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = (*circle.grid)(i);
    circle.points.col(i) << std::cos(s), std::sin(s), 0, 0, 0;
  }
  try {
    classify::classify_all(circle);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "extract_frames");
    CHECK(e.kind() == "DegenerateCurvature");
  }
}

TEST_CASE("equivalent characterizations agree across a curve family") {
  const auto curves = {
      profile_curve([](double) { return 1.0; }, [](double) { return 1.0; },
                    [](double s) { return 1.0 + 0.15 * s; },
                    [](double) { return 1.0; }),
      profile_curve(
          [](double s) { return 1.0 + (0.3 / std::sqrt(2.0)) *
                                          (1.0 - std::cos(std::sqrt(2.0) * s)); },
          [](double) { return 1.0; }, [](double) { return 1.0; },
          [](double) { return 1.0; })};
  for (const auto& curve : curves) {
    const auto fd = frenet::extract_frames(curve);
    const double tol = 1e-4;
    const auto [verdict, funcs] = classify::v1_helix_test(fd, tol);
    const auto ode = classify::v1_ode_check(fd, tol);
    const auto fit = classify::v1_integral_check(fd, tol);
    CHECK(verdict.is_constant == ode.pass);
    CHECK(ode.pass == fit.pass);
  }
}

TEST_CASE("oscillating k1 profile keeps the tangent-helix function constant") {
  // k1 = 1 + (eps/w)(1 - cos(w s)) with w^2 = k3^2 + k4^2 = 2 satisfies the
  // characterization with genuinely varying curvature.
  const auto curve = profile_curve(
      [](double s) {
        return 1.0 +
               (0.3 / std::sqrt(2.0)) * (1.0 - std::cos(std::sqrt(2.0) * s));
      },
      [](double) { return 1.0; }, [](double) { return 1.0; },
      [](double) { return 1.0; });
  const auto fd = frenet::extract_frames(curve);
  const auto [verdict, funcs] = classify::v1_helix_test(fd, 1e-4);
  CHECK(verdict.is_constant);
  const auto ode = classify::v1_ode_check(fd, 1e-4);
  CHECK(ode.pass);
  CHECK(ode.differential_max <= 1e-4);
  const auto axis = classify::v1_axis(fd, 1e-3);
  CHECK(axis.residual <= 1e-4);
  // The V4 coefficient is active on this instance.
  CHECK(axis.coefficients.row(3).cwiseAbs().maxCoeff() > 1e-3);

  // The fitted constants do not depend on the fitting window.
  const auto fit = classify::v1_integral_check(fd, 1e-4);
  CHECK(fit.pass);
  const Eigen::Index n = fd.grid->size();
  const auto sub = classify::v1_integral_check(fd, 1e-4, n / 4, 3 * n / 4);
  CHECK(std::abs(sub.A - fit.A) <= 1e-4);
  CHECK(std::abs(sub.B - fit.B) <= 1e-4);
}
