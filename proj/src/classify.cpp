#include "pentahelix/classify.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pentahelix/numkit.hpp"

namespace pentahelix::classify {

namespace {

constexpr double kCurvatureFloor = 1e-12;

/// Nodes to drop per end when scoring a series produced by `levels` nested
/// stencil derivatives: shifted windows reach 2*stride nodes into the grid
/// per level, and those values carry one-sided error.
Eigen::Index margin_for(const FrenetData& fd, int levels) {
  return 2 + 2 * fd.deriv_stride * static_cast<Eigen::Index>(levels);
}

void require_nonzero(const FrenetData& fd, int index) {
  const auto& k = fd.k(index).values;
  const double floor = kCurvatureFloor * std::max(1.0, k.abs().maxCoeff());
  if (k.abs().minCoeff() < floor) {
    throw DegenerateCurvature("curvature k" + std::to_string(index) +
                              " has a zero on the grid");
  }
}

void require_all_nonzero(const FrenetData& fd) {
  for (int i = 1; i <= 4; ++i) require_nonzero(fd, i);
}

ScalarSeries series(const FrenetData& fd, Eigen::ArrayXd v) {
  return {fd.grid, std::move(v)};
}

Eigen::ArrayXd d1(const FrenetData& fd, const Eigen::ArrayXd& v) {
  return numkit::differentiate_values(v, fd.grid->step(), 1, fd.deriv_stride);
}

/// Ingredients of the V1 characterizations.
struct V1Ingredients {
  Eigen::ArrayXd r;        // k1/k2
  Eigen::ArrayXd g;        // (k1/k2)' / k3
  Eigen::ArrayXd bracket;  // k1 k3 / k2 + g'
  Eigen::ArrayXd F;
  Eigen::ArrayXd f;        // bracket / k4
};

V1Ingredients v1_ingredients(const FrenetData& fd) {
  require_all_nonzero(fd);
  const auto& k1 = fd.k(1).values;
  const auto& k2 = fd.k(2).values;
  const auto& k3 = fd.k(3).values;
  const auto& k4 = fd.k(4).values;
  V1Ingredients out;
  out.r = k1 / k2;
  out.g = d1(fd, out.r) / k3;
  out.bracket = k1 * k3 / k2 + d1(fd, out.g);
  out.F = out.r.square() + out.g.square() + (out.bracket / k4).square();
  out.f = out.bracket / k4;
  return out;
}

/// Ingredients of the V5 characterizations.
struct V5Ingredients {
  Eigen::ArrayXd rho;  // k4/k3 (signed)
  Eigen::ArrayXd f;    // rho' / k2
  Eigen::ArrayXd z;    // k4 k2 / k3 + f'
  Eigen::ArrayXd G;
};

V5Ingredients v5_ingredients(const FrenetData& fd) {
  require_all_nonzero(fd);
  const auto& k1 = fd.k(1).values;
  const auto& k2 = fd.k(2).values;
  const auto& k3 = fd.k(3).values;
  const auto& k4 = fd.k(4).values;
  V5Ingredients out;
  out.rho = k4 / k3;
  out.f = d1(fd, out.rho) / k2;
  out.z = out.rho * k2 + d1(fd, out.f);
  out.G = (out.z / k1).square() + out.f.square() + out.rho.square();
  return out;
}

/// Normalize per-node frame coefficients into an axis estimate and score its
/// spread. target is the frame vector the angle is measured against (1-based).
AxisEstimate build_axis(const FrenetData& fd, const Mat5X& raw_coefficients,
                        int target, double axis_tol, int derivative_levels) {
  const Eigen::Index n = fd.grid->size();
  AxisEstimate axis;
  axis.coefficients.resize(5, n);
  axis.axis_per_node.resize(5, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double norm = raw_coefficients.col(c).norm();
    axis.coefficients.col(c) = raw_coefficients.col(c) / norm;
    Vec5 u = Vec5::Zero();
    for (int i = 0; i < 5; ++i) {
      u += axis.coefficients(i, c) * fd.frames[static_cast<std::size_t>(i)].col(c);
    }
    axis.axis_per_node.col(c) = u;
  }

  const Eigen::Index margin = margin_for(fd, derivative_levels);
  if (n <= 2 * margin) {
    throw GridTooSmall("grid too small to score an axis estimate");
  }
  Vec5 mean = Vec5::Zero();
  for (Eigen::Index c = margin; c < n - margin; ++c) {
    mean += axis.axis_per_node.col(c);
  }
  axis.mean_axis = mean.normalized();

  double spread = 0.0;
  double cos_acc = 0.0;
  for (Eigen::Index c = margin; c < n - margin; ++c) {
    spread = std::max(spread, (axis.axis_per_node.col(c) - axis.mean_axis).norm());
    cos_acc += fd.V(target).col(c).dot(axis.mean_axis);
  }
  axis.residual = spread;
  axis.cos_angle = cos_acc / static_cast<double>(n - 2 * margin);
  axis.angle = std::acos(std::clamp(axis.cos_angle, -1.0, 1.0));

  const Eigen::Index dmargin = margin_for(fd, derivative_levels + 1);
  Mat5X du(5, n);
  for (Eigen::Index r = 0; r < 5; ++r) {
    du.row(r) = d1(fd, axis.axis_per_node.row(r).transpose().array()).transpose();
  }
  double dmax = 0.0;
  for (Eigen::Index c = dmargin; c < n - dmargin; ++c) {
    dmax = std::max(dmax, du.col(c).norm());
  }
  axis.derivative_max = dmax;

  if (axis.residual > axis_tol || axis.derivative_max > axis_tol) {
    throw AxisNotConstant("axis spread " + std::to_string(axis.residual) +
                          " / drift " + std::to_string(axis.derivative_max) +
                          " exceeds " + std::to_string(axis_tol) +
                          "; characterization and axis formula disagree");
  }
  if (!(axis.cos_angle > 0.0 && axis.angle < M_PI / 2.0 && axis.angle > 0.0)) {
    throw Error("Internal", "axis angle left (0, pi/2); sign fixing failed");
  }
  return axis;
}

}  // namespace

std::pair<ConstancyVerdict, V1Functions> v1_helix_test(const FrenetData& fd,
                                                       double tol) {
  const V1Ingredients ing = v1_ingredients(fd);
  V1Functions funcs{series(fd, ing.F), series(fd, ing.f), {}, {}};
  const ConstancyVerdict verdict =
      numkit::constancy(funcs.F, tol, margin_for(fd, 2));
  return {verdict, std::move(funcs)};
}

AxisEstimate v1_axis(const FrenetData& fd, double axis_tol) {
  const V1Ingredients ing = v1_ingredients(fd);
  const Eigen::Index n = fd.grid->size();
  Mat5X coeff(5, n);
  coeff.row(0).setOnes();
  coeff.row(1).setZero();
  coeff.row(2) = ing.r.transpose();
  coeff.row(3) = ing.g.transpose();
  coeff.row(4) = ing.f.transpose();
  return build_axis(fd, coeff, 1, axis_tol, 2);
}

OdeIdentityReport v1_ode_check(const FrenetData& fd, double tol) {
  const V1Ingredients ing = v1_ingredients(fd);
  const auto& k4 = fd.k(4).values;
  const double h = fd.grid->step();

  OdeIdentityReport report;
  // f' = -k4 g integrates to: f + ∫ k4 g = const.
  const Eigen::ArrayXd first_integral =
      ing.f + numkit::cumulative_integral_values(k4 * ing.g, h);
  report.integrated =
      numkit::constancy(series(fd, first_integral), tol, margin_for(fd, 2));
  report.pass = report.integrated.is_constant;

  const Eigen::ArrayXd differential = d1(fd, ing.f) / k4 + ing.g;
  const Eigen::Index margin = margin_for(fd, 3);
  const Eigen::Index n = fd.grid->size();
  report.differential_max =
      differential.segment(margin, n - 2 * margin).abs().maxCoeff();
  return report;
}

IntegralFitReport v1_integral_check(const FrenetData& fd, double tol,
                                    Eigen::Index fit_begin, Eigen::Index fit_end) {
  const V1Ingredients ing = v1_ingredients(fd);
  const auto& k1 = fd.k(1).values;
  const auto& k2 = fd.k(2).values;
  const auto& k3 = fd.k(3).values;
  const auto& k4 = fd.k(4).values;
  const double h = fd.grid->step();
  const Eigen::Index n = fd.grid->size();

  const Eigen::ArrayXd phi = numkit::cumulative_integral_values(k4, h);
  const Eigen::ArrayXd c = k1 * k3 / k2;
  const Eigen::ArrayXd sin_phi = phi.sin();
  const Eigen::ArrayXd cos_phi = phi.cos();
  const Eigen::ArrayXd int_sin = numkit::cumulative_integral_values(c * sin_phi, h);
  const Eigen::ArrayXd int_cos = numkit::cumulative_integral_values(c * cos_phi, h);

  // g = (A - int_sin) sin(phi) - (B + int_cos) cos(phi) rearranges to a
  // two-parameter fit: y = A sin(phi) - B cos(phi).
  const Eigen::ArrayXd y = ing.g + int_sin * sin_phi + int_cos * cos_phi;

  const Eigen::Index margin = margin_for(fd, 1);
  Eigen::Index lo = fit_begin >= 0 ? fit_begin : margin;
  Eigen::Index hi = fit_end >= 0 ? fit_end : n - margin;
  lo = std::clamp<Eigen::Index>(lo, 0, n);
  hi = std::clamp<Eigen::Index>(hi, lo + 2, n);

  Eigen::MatrixXd design(hi - lo, 2);
  design.col(0) = sin_phi.segment(lo, hi - lo).matrix();
  design.col(1) = -cos_phi.segment(lo, hi - lo).matrix();
  const Eigen::VectorXd target = y.segment(lo, hi - lo).matrix();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  IntegralFitReport report;
  report.condition = svd.singularValues()(0) /
                     std::max(svd.singularValues()(1), 1e-300);
  if (report.condition > 1e8) {
    throw IllConditionedFit("integral-identity design matrix condition " +
                            std::to_string(report.condition));
  }
  const Eigen::Vector2d ab = svd.solve(target);
  report.A = ab(0);
  report.B = ab(1);
  report.residual = (target - design * ab).cwiseAbs().maxCoeff();
  report.pass = report.residual <= tol;
  return report;
}

V3SlantReport v3_slant_test(const FrenetData& fd, double tol) {
  require_all_nonzero(fd);
  V3SlantReport report;
  report.ratio21 = numkit::constancy(
      series(fd, fd.k(2).values / fd.k(1).values), tol, margin_for(fd, 0));
  report.ratio34 = numkit::constancy(
      series(fd, fd.k(3).values / fd.k(4).values.abs()), tol, margin_for(fd, 0));
  report.pass = report.ratio21.is_constant && report.ratio34.is_constant;
  return report;
}

AxisEstimate v3_axis(const FrenetData& fd, double axis_tol) {
  require_all_nonzero(fd);
  const Eigen::Index n = fd.grid->size();
  Mat5X coeff(5, n);
  coeff.row(0) = (fd.k(2).values / fd.k(1).values).transpose();
  coeff.row(1).setZero();
  coeff.row(2).setOnes();
  coeff.row(3).setZero();
  coeff.row(4) = (fd.k(3).values / fd.k(4).values).transpose();
  return build_axis(fd, coeff, 3, axis_tol, 0);
}

NormRatioReport norm_ratio_check(const FrenetData& fd, double tol) {
  require_all_nonzero(fd);
  const Eigen::Index n = fd.grid->size();

  auto norms = [&](int i) -> Eigen::ArrayXd {
    return frenet::frame_derivative(fd, i).colwise().norm().transpose().array();
  };
  const Eigen::ArrayXd lhs21 = norms(2) / norms(1);
  const Eigen::ArrayXd lhs45 = norms(4) / norms(5);
  const Eigen::ArrayXd rhs21 =
      (1.0 + (fd.k(2).values / fd.k(1).values).square()).sqrt();
  const Eigen::ArrayXd rhs45 =
      (1.0 + (fd.k(3).values / fd.k(4).values).square()).sqrt();

  // One stencil level went into the left sides.
  const Eigen::Index margin =
      2 + 2 * (fd.provenance == JetSource::Exact
                   ? 1
                   : std::max<Eigen::Index>(fd.deriv_stride / 2, 1));
  NormRatioReport report;
  report.mismatch21 =
      (lhs21 - rhs21).segment(margin, n - 2 * margin).abs().maxCoeff();
  report.mismatch45 =
      (lhs45 - rhs45).segment(margin, n - 2 * margin).abs().maxCoeff();
  report.ratio21_norms = numkit::constancy(series(fd, lhs21), tol, margin);
  report.ratio45_norms = numkit::constancy(series(fd, lhs45), tol, margin);

  const bool ratios_constant =
      report.ratio21_norms.is_constant && report.ratio45_norms.is_constant;
  report.consistent_with_v3 = ratios_constant == v3_slant_test(fd, tol).pass;
  return report;
}

V5SlantReport v5_slant_test(const FrenetData& fd, double tol) {
  const V5Ingredients ing = v5_ingredients(fd);
  const auto& k1 = fd.k(1).values;
  const double h = fd.grid->step();
  const Eigen::Index n = fd.grid->size();

  V5SlantReport report;
  report.g_verdict = numkit::constancy(series(fd, ing.G), tol, margin_for(fd, 2));

  // (z/k1)' + f k1 = 0 integrates to: z/k1 + ∫ f k1 = const.
  const Eigen::ArrayXd first_integral =
      ing.z / k1 + numkit::cumulative_integral_values(ing.f * k1, h);
  report.integrated =
      numkit::constancy(series(fd, first_integral), tol, margin_for(fd, 2));

  const Eigen::ArrayXd differential = d1(fd, ing.z / k1) + ing.f * k1;
  const Eigen::Index margin = margin_for(fd, 3);
  report.differential_max =
      differential.segment(margin, n - 2 * margin).abs().maxCoeff();

  if (report.g_verdict.is_constant != report.integrated.is_constant) {
    throw InternalInconsistency(
        "constancy route says " + std::to_string(report.g_verdict.is_constant) +
        " (residual " + std::to_string(report.g_verdict.residual) +
        ") but the differential identity says " +
        std::to_string(report.integrated.is_constant) + " (residual " +
        std::to_string(report.integrated.residual) + ")");
  }
  report.pass = report.g_verdict.is_constant && report.integrated.is_constant;
  report.functions =
      V5Functions{series(fd, ing.f), series(fd, ing.G), series(fd, differential)};
  return report;
}

AxisEstimate v5_axis(const FrenetData& fd, double axis_tol) {
  const V5Ingredients ing = v5_ingredients(fd);
  const Eigen::Index n = fd.grid->size();
  Mat5X coeff(5, n);
  coeff.row(0) = (ing.z / fd.k(1).values).transpose();
  coeff.row(1) = (-ing.f).transpose();
  coeff.row(2) = ing.rho.transpose();
  coeff.row(3).setZero();
  coeff.row(4).setOnes();
  return build_axis(fd, coeff, 5, axis_tol, 2);
}

namespace {

/// First-derivative stencil rows (stride 1): weights and column indices.
struct StencilRow {
  std::array<Eigen::Index, 6> cols{};
  std::array<double, 6> w{};
  int count = 0;
};

std::vector<StencilRow> derivative_rows(Eigen::Index n, double h) {
  std::vector<StencilRow> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index start = std::clamp<Eigen::Index>(i - 2, 0, n - 5);
    Eigen::VectorXd offsets(5);
    for (Eigen::Index j = 0; j < 5; ++j) {
      offsets(j) = static_cast<double>(start + j - i);
    }
    const Eigen::VectorXd w = numkit::fornberg_weights(offsets, 1);
    auto& row = rows[static_cast<std::size_t>(i)];
    row.count = 5;
    for (Eigen::Index j = 0; j < 5; ++j) {
      row.cols[static_cast<std::size_t>(j)] = start + j;
      row.w[static_cast<std::size_t>(j)] = w(j) / h;
    }
  }
  return rows;
}

/// sigma_min of a sparse operator: inverse power iteration on M^T M, then
/// shifted refinements until the eigenpair residual is tight. The variables
/// are interleaved per node, so the matrix is banded and natural-ordering
/// LDLT factors it without fill. The shift is kept strictly below the
/// current Rayleigh quotient so the factorization stays positive definite.
double sigma_min(const Eigen::SparseMatrix<double>& m) {
  using Solver = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                       Eigen::NaturalOrdering<int>>;
  const Eigen::SparseMatrix<double> normal =
      Eigen::SparseMatrix<double>(m.transpose()) * m;
  const Eigen::Index n = normal.rows();
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();

  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = std::sin(static_cast<double>(i) + 1.0);
  }
  x.normalize();

  double lambda = x.dot(normal * x);
  double eta = std::numeric_limits<double>::infinity();
  double shift = 0.0;
  for (int phase = 0; phase < 5; ++phase) {
    Eigen::SparseMatrix<double> shifted = normal;
    if (shift > 0.0) shifted -= shift * identity;
    Solver solver(shifted);
    if (solver.info() != Eigen::Success) {
      if (shift == 0.0) {
        throw Error("Internal", "factorization of the constraint normal matrix failed");
      }
      shift *= 0.5;  // overshot the bottom eigenvalue; back off
      continue;
    }
    const int iterations = phase == 0 ? 16 : 6;
    for (int it = 0; it < iterations; ++it) {
      x = solver.solve(x);
      x.normalize();
    }
    lambda = x.dot(normal * x);
    eta = (normal * x - lambda * x).norm();
    if (eta <= 1e-9 * std::max(lambda, 1e-300)) break;
    shift = std::max(0.0, lambda - 4.0 * eta - 1e-3 * lambda);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace

Eigen::SparseMatrix<double> nonexistence_operator(const FrenetData& fd, int which) {
  if (which != 2 && which != 4) {
    throw Error("Internal", "nonexistence operator is defined for V2 and V4");
  }
  const Eigen::Index n = fd.grid->size();
  const auto& k1 = fd.k(1).values;
  const auto& k2 = fd.k(2).values;
  const auto& k3 = fd.k(3).values;
  const auto& k4 = fd.k(4).values;
  const auto rows = derivative_rows(n, fd.grid->step());

  // Unknowns interleaved per node (3 components) to keep the factor banded.
  const auto col = [](Eigen::Index node, Eigen::Index comp) {
    return 3 * node + comp;
  };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 16);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index base = 5 * i;
    const auto& sten = rows[static_cast<std::size_t>(i)];
    if (which == 2) {
      // components: 0 = u2, 1 = u4, 2 = u5
      trip.emplace_back(base + 0, col(i, 0), -k1(i));
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 1, col(sten.cols[static_cast<std::size_t>(j)], 0),
                          sten.w[static_cast<std::size_t>(j)]);
      }
      trip.emplace_back(base + 2, col(i, 0), k2(i));
      trip.emplace_back(base + 2, col(i, 1), -k3(i));
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 3, col(sten.cols[static_cast<std::size_t>(j)], 1),
                          sten.w[static_cast<std::size_t>(j)]);
      }
      trip.emplace_back(base + 3, col(i, 2), -k4(i));
      trip.emplace_back(base + 4, col(i, 1), k4(i));
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 4, col(sten.cols[static_cast<std::size_t>(j)], 2),
                          sten.w[static_cast<std::size_t>(j)]);
      }
    } else {
      // components: 0 = u1, 1 = u2, 2 = u4
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 0, col(sten.cols[static_cast<std::size_t>(j)], 0),
                          sten.w[static_cast<std::size_t>(j)]);
      }
      trip.emplace_back(base + 0, col(i, 1), -k1(i));
      trip.emplace_back(base + 1, col(i, 0), k1(i));
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 1, col(sten.cols[static_cast<std::size_t>(j)], 1),
                          sten.w[static_cast<std::size_t>(j)]);
      }
      trip.emplace_back(base + 2, col(i, 1), k2(i));
      trip.emplace_back(base + 2, col(i, 2), -k3(i));
      for (int j = 0; j < sten.count; ++j) {
        trip.emplace_back(base + 3, col(sten.cols[static_cast<std::size_t>(j)], 2),
                          sten.w[static_cast<std::size_t>(j)]);
      }
      trip.emplace_back(base + 4, col(i, 2), k4(i));
    }
  }
  Eigen::SparseMatrix<double> m(5 * n, 3 * n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

NonexistenceReport v2_v4_nonexistence_check(const FrenetData& fd) {
  require_nonzero(fd, 1);
  require_nonzero(fd, 3);
  require_nonzero(fd, 4);
  NonexistenceReport report;
  report.sigma_min_v2 = sigma_min(nonexistence_operator(fd, 2));
  report.sigma_min_v4 = sigma_min(nonexistence_operator(fd, 4));
  return report;
}

double v5_implication_check(const FrenetData& fd, double tol) {
  const ConstancyVerdict ratio21 = numkit::constancy(
      series(fd, fd.k(2).values / fd.k(1).values), tol, margin_for(fd, 0));
  if (!ratio21.is_constant) {
    throw ImplicationViolated(
        "V5 slant helix with k4/k3 constant must have k2/k1 constant; residual " +
        std::to_string(ratio21.residual));
  }
  return ratio21.residual;
}

namespace {

template <class F>
auto run_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

}  // namespace

HelixReport classify_all(const frenet::CurveSamples& curve, const Tolerances& config) {
  HelixReport report;
  const FrenetData fd = run_stage("extract_frames", [&] {
    return frenet::extract_frames(curve, config.unit_speed);
  });
  const double tol = config.effective(fd.provenance);
  const double axis_tol = config.axis_factor * tol;
  report.tolerance = tol;
  report.provenance = fd.provenance;
  report.step = fd.grid->step();
  {
    const Eigen::Index n = fd.grid->size();
    const auto k4_interior = fd.k(4).values.segment(2, n - 4);
    report.k4_sign = k4_interior.mean() >= 0.0 ? 1.0 : -1.0;
  }

  run_stage("v1_helix_test", [&] {
    auto [verdict, funcs] = v1_helix_test(fd, tol);
    report.v1_verdict = verdict;
    report.v1_functions = std::move(funcs);
    report.v1_pass = verdict.is_constant;
    return 0;
  });
  run_stage("v1_ode_check", [&] {
    report.v1_ode = v1_ode_check(fd, tol);
    return 0;
  });
  run_stage("v1_integral_check", [&] {
    report.v1_integral = v1_integral_check(fd, tol);
    report.v1_functions.A = report.v1_integral.A;
    report.v1_functions.B = report.v1_integral.B;
    return 0;
  });
  if (report.v1_pass) {
    run_stage("v1_axis", [&] {
      report.v1_axis = v1_axis(fd, axis_tol);
      return 0;
    });
  }

  run_stage("v3_slant_test", [&] {
    report.v3 = v3_slant_test(fd, tol);
    return 0;
  });
  if (report.v3.pass) {
    run_stage("v3_axis", [&] {
      report.v3_axis = v3_axis(fd, axis_tol);
      return 0;
    });
  }
  run_stage("norm_ratio_check", [&] {
    report.norm_ratios = norm_ratio_check(fd, tol);
    return 0;
  });

  run_stage("v5_slant_test", [&] {
    report.v5 = v5_slant_test(fd, tol);
    return 0;
  });
  if (report.v5.pass) {
    run_stage("v5_axis", [&] {
      report.v5_axis = v5_axis(fd, axis_tol);
      return 0;
    });
    const ConstancyVerdict ratio43 = numkit::constancy(
        series(fd, fd.k(4).values.abs() / fd.k(3).values), tol, margin_for(fd, 0));
    if (ratio43.is_constant) {
      run_stage("v5_implication_check", [&] {
        report.implication_residual = v5_implication_check(fd, tol);
        return 0;
      });
    }
  }

  run_stage("v2_v4_nonexistence_check", [&] {
    report.nonexistence = v2_v4_nonexistence_check(fd);
    return 0;
  });
  return report;
}

}  // namespace pentahelix::classify
