#pragma once

#include <Eigen/SparseCore>

#include <optional>
#include <utility>

#include "pentahelix/frenet.hpp"
#include "pentahelix/types.hpp"

namespace pentahelix::classify {

using frenet::FrenetData;

/// Reconstructed fixed direction for a positive helix verdict. The axis is
/// built per node as the normalized frame-coordinate combination the theory
/// prescribes; a genuinely fixed direction shows up as a tiny spread of
/// U(s) around its mean.
struct AxisEstimate {
  Mat5X axis_per_node;   // unit U(s), one column per node
  Mat5X coefficients;    // u_i(s): U in frame coordinates, rows i = 1..5
  Vec5 mean_axis;        // unit
  double residual = 0.0;        // max interior ‖U(s) − mean_axis‖
  double derivative_max = 0.0;  // max interior ‖U′(s)‖ (stencil derivative)
  double cos_angle = 0.0;       // interior mean of <V_target(s), mean_axis>
  double angle = 0.0;           // radians, in (0, pi/2)
};

/// Scalar functions behind the tangent-helix characterizations.
struct V1Functions {
  ScalarSeries F;  // ratio-and-derivative combination whose constancy decides
  ScalarSeries f;  // the C^2 companion function of the ODE characterization
  double A = std::numeric_limits<double>::quiet_NaN();  // integral-identity
  double B = std::numeric_limits<double>::quiet_NaN();  // constants, once fitted
};

/// ODE-style identity report: the identity is scored in integrated form
/// (constancy of the first integral), the raw differential maximum is kept
/// as a diagnostic.
struct OdeIdentityReport {
  ConstancyVerdict integrated;
  double differential_max = 0.0;
  bool pass = false;
};

struct IntegralFitReport {
  double A = 0.0;
  double B = 0.0;
  double residual = 0.0;   // max mismatch of the fitted identity
  double condition = 0.0;  // design-matrix condition number
  bool pass = false;
};

struct V3SlantReport {
  ConstancyVerdict ratio21;  // k2/k1
  ConstancyVerdict ratio34;  // k3/|k4|
  bool pass = false;
};

/// Functions behind the V5 characterization: f = (k4/k3)' / k2, the
/// constancy function G, and the differential identity's left side.
struct V5Functions {
  ScalarSeries f;
  ScalarSeries G;
  ScalarSeries ode_residual;
};

struct V5SlantReport {
  ConstancyVerdict g_verdict;   // constancy of G
  ConstancyVerdict integrated;  // constancy of the identity's first integral
  double differential_max = 0.0;
  bool pass = false;
  V5Functions functions;
};

struct NormRatioReport {
  double mismatch21 = 0.0;  // |‖V2′‖/‖V1′‖ − sqrt(1+(k2/k1)^2)| max
  double mismatch45 = 0.0;  // |‖V4′‖/‖V5′‖ − sqrt(1+(k3/k4)^2)| max
  ConstancyVerdict ratio21_norms;
  ConstancyVerdict ratio45_norms;
  bool consistent_with_v3 = false;
};

/// Spectral witness that the V2/V4 axis systems only admit the zero
/// solution: smallest singular value of the discretized constraint operator
/// (unit-norm coefficient vectors cannot push the residual below it).
struct NonexistenceReport {
  double sigma_min_v2 = 0.0;
  double sigma_min_v4 = 0.0;
};

struct HelixReport {
  bool v1_pass = false;
  ConstancyVerdict v1_verdict;
  V1Functions v1_functions;
  OdeIdentityReport v1_ode;
  IntegralFitReport v1_integral;
  std::optional<AxisEstimate> v1_axis;

  V3SlantReport v3;
  std::optional<AxisEstimate> v3_axis;

  V5SlantReport v5;
  std::optional<AxisEstimate> v5_axis;

  std::optional<double> implication_residual;  // k2/k1 residual when applicable
  NormRatioReport norm_ratios;
  NonexistenceReport nonexistence;

  double k4_sign = 1.0;
  JetSource provenance = JetSource::Exact;
  double tolerance = 0.0;  // effective constancy tolerance used
  double step = 0.0;
};

/// Constancy of F = (k1/k2)^2 + [(k1/k2)'/k3]^2 + [(k1 k3/k2 +
/// ((k1/k2)'/k3)')/k4]^2 decides the tangent-helix property.
std::pair<ConstancyVerdict, V1Functions> v1_helix_test(const FrenetData& fd,
                                                       double tol);

/// Fixed direction of a tangent helix; requires a positive v1_helix_test.
AxisEstimate v1_axis(const FrenetData& fd, double axis_tol);

/// The paired first-order identities in f: k4 f = k1 k3/k2 + ((k1/k2)'/k3)'
/// and f'/k4 = -(k1/k2)'/k3, scored as constancy of f + ∫ k4 (k1/k2)'/k3.
OdeIdentityReport v1_ode_check(const FrenetData& fd, double tol);

/// Oscillatory-integral identity: fits the two constants and reports the
/// worst mismatch. fit_begin/fit_end (node indices, end exclusive) restrict
/// the fitted window; the inner integrals always start at the grid front.
IntegralFitReport v1_integral_check(const FrenetData& fd, double tol,
                                    Eigen::Index fit_begin = -1,
                                    Eigen::Index fit_end = -1);

V3SlantReport v3_slant_test(const FrenetData& fd, double tol);

/// Fixed direction of a V3 slant helix; requires a positive v3_slant_test.
AxisEstimate v3_axis(const FrenetData& fd, double axis_tol);

/// Unconditional identities ‖V2′‖/‖V1′‖ = sqrt(1+(k2/k1)^2) and ‖V4′‖/‖V5′‖ =
/// sqrt(1+(k3/k4)^2), plus agreement of their constancy with v3_slant_test.
NormRatioReport norm_ratio_check(const FrenetData& fd, double tol);

/// Both routes of the V5 characterization; they must agree or an
/// InternalInconsistency is raised.
V5SlantReport v5_slant_test(const FrenetData& fd, double tol);

/// Fixed direction of a V5 slant helix; requires a positive v5_slant_test.
AxisEstimate v5_axis(const FrenetData& fd, double axis_tol);

/// sigma_min of the discretized coefficient systems that a fixed direction
/// with constant angle against V2 (resp. V4) would have to satisfy.
NonexistenceReport v2_v4_nonexistence_check(const FrenetData& fd);

/// Constraint operator behind the nonexistence check, for independent
/// verification. `which` is 2 or 4.
Eigen::SparseMatrix<double> nonexistence_operator(const FrenetData& fd, int which);

/// Once a curve is a V5 slant helix with k4/k3 constant, k2/k1 must be
/// constant too; returns that residual, throws ImplicationViolated if not.
double v5_implication_check(const FrenetData& fd, double tol);

/// Run the full pipeline on a sampled curve. Errors are re-thrown as
/// StageError tagged with the failing stage.
HelixReport classify_all(const frenet::CurveSamples& curve,
                         const Tolerances& config = {});

}  // namespace pentahelix::classify
