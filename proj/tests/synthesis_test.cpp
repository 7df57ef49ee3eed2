#include <doctest.h>

#include <cmath>
#include <random>

#include "pentahelix/frenet.hpp"
#include "pentahelix/numkit.hpp"
#include "pentahelix/synthesis.hpp"

using namespace pentahelix;

TEST_CASE("closed-form curve is unit speed to 1e-9") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 2, 3, 4;
  const auto curve =
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 10.0, 1e-3));
  const ConstancyVerdict v = frenet::check_unit_speed(curve, 1e-9);
  CHECK(v.is_constant);
  CHECK(v.residual <= 1e-9);
}

TEST_CASE("vanishing curvature is rejected") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 0, 3, 4;
  CHECK_THROWS_AS(
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 1.0, 1e-2)),
      DegenerateCurvature);

  synthesis::CurvatureSpec cs;
  cs.k = {[](double) { return 1.0; }, [](double s) { return 1.0 - s; },
          [](double) { return 1.0; }, [](double) { return 1.0; }};
  cs.s1 = 2.0;
  cs.step = 1e-2;
  CHECK_THROWS_AS(synthesis::synthesize_from_curvatures(cs), DegenerateCurvature);
}

TEST_CASE("a skewed initial frame is rejected") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 2, 3, 4;
  spec.initial_frame(0, 1) = 0.5;
  CHECK_THROWS_WITH_AS(
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 1.0, 1e-2)),
      doctest::Contains("orthonormal"), Error);
}

TEST_CASE("equal-curvature trajectory superposes two circular motions") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 1, 1, 1;
  const auto curve =
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 10.0, 1e-3));

  // Independent spectral construction: P_j projects onto the plane where
  // K^2 acts as -w_j^2, so P_j alpha'' + w_j^2 P_j alpha must be constant.
  const Mat5 K = synthesis::frenet_matrix(spec.k);
  const auto [w1, w2] = numkit::frequencies(K);
  CHECK(std::abs(w1 - 1.0) <= 1e-10);
  CHECK(std::abs(w2 - std::sqrt(3.0)) <= 1e-10);
  const Mat5 K2 = K * K;
  const Mat5 I = Mat5::Identity();
  const double a = w1 * w1, b = w2 * w2;
  const Mat5 P1 = K2 * (K2 + b * I) / (a * (a - b));
  const Mat5 P2 = K2 * (K2 + a * I) / (b * (b - a));

  const Eigen::Index n = curve.grid->size();
  for (const auto& [P, wsq] : {std::pair{P1, a}, std::pair{P2, b}}) {
    Mat5X centered(5, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      centered.col(i) = P * (curve.jets[1].col(i) + wsq * curve.points.col(i));
    }
    Vec5 mean = centered.rowwise().mean();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      worst = std::max(worst, (centered.col(i) - mean).norm());
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("prescribed constant curvatures agree with the closed form") {
  synthesis::WCurveSpec wspec;
  wspec.k << 1, 2, 3, 4;
  const Grid grid = Grid::uniform(0.0, 5.0, 1e-3);
  const auto closed = synthesis::synthesize_w_curve(wspec, grid);

  synthesis::CurvatureSpec cs;
  cs.k = {[](double) { return 1.0; }, [](double) { return 2.0; },
          [](double) { return 3.0; }, [](double) { return 4.0; }};
  cs.s1 = 5.0;
  const auto integrated = synthesis::synthesize_from_curvatures(cs);

  CHECK((closed.points - integrated.points).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("flow property: frame(s+t) = exp(tK) frame(s)") {
  synthesis::WCurveSpec spec;
  spec.k << 0.8, 2.1, 1.7, 3.3;
  const Grid grid = Grid::uniform(0.0, 5.0, 1e-3);
  const auto curve = synthesis::synthesize_w_curve(spec, grid);
  const auto fd = frenet::extract_frames(curve);
  const Mat5 K = synthesis::frenet_matrix(spec.k);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto i = static_cast<Eigen::Index>(rng() % 2000);
    const auto j = static_cast<Eigen::Index>(rng() % 2000) + 1500;
    const double t = (*fd.grid)(j) - (*fd.grid)(i);
    const Mat5 flow = numkit::skew_expm(K, t);
    Mat5 fi, fj;
    for (int r = 0; r < 5; ++r) {
      fi.row(r) = fd.frames[static_cast<std::size_t>(r)].col(i).transpose();
      fj.row(r) = fd.frames[static_cast<std::size_t>(r)].col(j).transpose();
    }
    CHECK((fj - flow * fi).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("rotated frame and offset origin synthesize cleanly") {
  synthesis::WCurveSpec spec;
  spec.k << 1, 2, 3, 4;
  Eigen::HouseholderQR<Mat5> qr(Mat5::Random());
  Mat5 q = qr.householderQ();
  if (q.determinant() < 0) q.row(4) *= -1.0;
  spec.initial_frame = q;
  spec.initial_point << 3, -1, 2, 0.5, -7;
  const auto curve =
      synthesis::synthesize_w_curve(spec, Grid::uniform(0.0, 5.0, 1e-3));
  CHECK((curve.points.col(0) - spec.initial_point).norm() <= 1e-12);
  CHECK(frenet::check_unit_speed(curve, 1e-9).is_constant);
  const auto fd = frenet::extract_frames(curve);
  const Eigen::Index n = fd.grid->size();
  const double expected[4] = {1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(fd.k(i + 1).values.segment(2, n - 4).mean() - expected[i]) <=
          1e-6);
  }
}

TEST_CASE("nearly equal frequencies fall back to stepping") {
  // k chosen so the two rotation frequencies collide: k1=k3=k, k2 -> 0 limit
  // is not allowed, so force near-degeneracy via k2 tiny against k1=k3=k4.
  synthesis::WCurveSpec spec;
  spec.k << 1.0, 1e-5, 1.0, 1.0;
  const Grid grid = Grid::uniform(0.0, 2.0, 1e-3);
  const auto curve = synthesis::synthesize_w_curve(spec, grid);
  const ConstancyVerdict v = frenet::check_unit_speed(curve, 1e-8);
  CHECK(v.is_constant);
}

TEST_CASE("too-coarse integration is refused") {
  synthesis::CurvatureSpec cs;
  cs.k = {[](double) { return 2.0; }, [](double) { return 2.0; },
          [](double) { return 2.0; }, [](double) { return 2.0; }};
  cs.s1 = 10.0;
  cs.step = 0.5;
  CHECK_THROWS_WITH_AS(synthesis::synthesize_from_curvatures(cs),
                       doctest::Contains("drifted"), Error);
}

TEST_CASE("unit-speed residual of the integrated path stays below 1e-7") {
  synthesis::CurvatureSpec cs;
  cs.k = {[](double s) { return 1.0 + 0.3 * std::sin(s); },
          [](double s) { return 2.0 * (1.0 + 0.3 * std::sin(s)); },
          [](double s) { return 1.0 + 0.3 * std::cos(s); },
          [](double s) { return 2.0 * (1.0 + 0.3 * std::cos(s)); }};
  cs.s1 = 2.0 * M_PI;
  const auto curve = synthesis::synthesize_from_curvatures(cs);
  const ConstancyVerdict v = frenet::check_unit_speed(curve, 1e-7);
  CHECK(v.is_constant);
}
