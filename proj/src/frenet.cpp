#include "pentahelix/frenet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pentahelix/numkit.hpp"

namespace pentahelix::frenet {

namespace {

constexpr double kDegeneracyTol = 1e-10;  // Gram-Schmidt residual, relative

Eigen::Index stride_for(double target_spacing, double h, Eigen::Index n) {
  const auto ideal = static_cast<Eigen::Index>(std::llround(target_spacing / h));
  return std::clamp<Eigen::Index>(ideal, 1, std::max<Eigen::Index>(1, (n - 1) / 20));
}

Eigen::ArrayXd column_norms(const Mat5X& m) {
  return m.colwise().norm().transpose().array();
}

/// Signed orthogonal complement of four row vectors: <x, u> = det[v1..v4; x]
/// for every x, so u completes the frame with positive determinant.
Vec5 cofactor_complement(const Vec5& v1, const Vec5& v2, const Vec5& v3,
                         const Vec5& v4) {
  Eigen::Matrix<double, 4, 5> rows;
  rows.row(0) = v1.transpose();
  rows.row(1) = v2.transpose();
  rows.row(2) = v3.transpose();
  rows.row(3) = v4.transpose();
  Vec5 u;
  double sign = 1.0;  // (-1)^(5+c), c = 1..5
  for (Eigen::Index c = 0; c < 5; ++c) {
    Eigen::Matrix4d minor;
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (j == c) continue;
      minor.col(col++) = rows.col(j);
    }
    u(c) = sign * minor.determinant();
    sign = -sign;
  }
  return u;
}

}  // namespace

std::vector<Mat5X> finite_difference_jets(const Mat5X& points, double h,
                                          int max_order) {
  const Eigen::Index n = points.cols();
  // Spacing targets per derivative order: wide enough that rounding noise in
  // the samples stays below the stencil truncation error.
  static constexpr double kTargetSpacing[5] = {0.0, 7.5e-4, 2.5e-3, 6e-3, 1.1e-2};
  std::vector<Mat5X> jets;
  jets.reserve(static_cast<std::size_t>(max_order));
  for (int m = 1; m <= max_order; ++m) {
    const Eigen::Index width = m + 5;
    Eigen::Index stride = static_cast<Eigen::Index>(std::llround(kTargetSpacing[m] / h));
    stride = std::clamp<Eigen::Index>(stride, 1,
                                      std::max<Eigen::Index>(1, (n - 1) / (width - 1)));
    Mat5X jet(5, n);
    for (Eigen::Index r = 0; r < 5; ++r) {
      jet.row(r) = numkit::nth_derivative_values(points.row(r).transpose().array(),
                                                 h, m, stride)
                       .transpose();
    }
    jets.push_back(std::move(jet));
  }
  return jets;
}

FrenetData extract_frames(const CurveSamples& curve, double unit_speed_tol) {
  if (!curve.grid) throw Error("Internal", "curve without a grid");
  const Eigen::Index n = curve.grid->size();
  if (curve.points.cols() != n) {
    throw Error("Internal", "curve points do not match the grid");
  }
  if (!curve.points.allFinite()) {
    throw NonFiniteState("curve points contain non-finite values");
  }
  const double h = curve.grid->step();
  const JetSource source = curve.jet_source();

  const std::vector<Mat5X>* jets = &curve.jets;
  std::vector<Mat5X> fd_jets;
  if (source == JetSource::FiniteDifference) {
    fd_jets = finite_difference_jets(curve.points, h, 4);
    jets = &fd_jets;
  } else if (curve.jets.size() < 4) {
    throw Error("Internal", "exact jets must provide at least four derivatives");
  }

  FrenetData fd;
  fd.grid = curve.grid;
  fd.provenance = source;
  for (auto& f : fd.frames) f.resize(5, n);

  Eigen::ArrayXd r22(n), r33(n), r44(n);
  const Mat5X& j1 = (*jets)[0];
  for (Eigen::Index c = 0; c < n; ++c) {
    const double speed = j1.col(c).norm();
    if (std::abs(speed - 1.0) > unit_speed_tol) {
      throw NotUnitSpeed("‖α′‖ = " + std::to_string(speed) +
                         " at node " + std::to_string(c) +
                         "; reparametrize to arc length first");
    }
    fd.frames[0].col(c) = j1.col(c) / speed;
    for (int i = 1; i < 4; ++i) {
      Vec5 w = (*jets)[static_cast<std::size_t>(i)].col(c);
      const double input_norm = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (int l = 0; l < i; ++l) {
          w -= w.dot(fd.frames[static_cast<std::size_t>(l)].col(c)) *
               fd.frames[static_cast<std::size_t>(l)].col(c);
        }
      }
      const double res = w.norm();
      if (res < kDegeneracyTol * std::max(input_norm, 1e-300)) {
        throw DegenerateCurvature(
            "derivatives span fewer than " + std::to_string(i + 1) +
            " directions at node " + std::to_string(c) + " (curvature k" +
            std::to_string(i) + " vanishes)");
      }
      fd.frames[static_cast<std::size_t>(i)].col(c) = w / res;
      if (i == 1) r22(c) = res;
      if (i == 2) r33(c) = res;
      if (i == 3) r44(c) = res;
    }
    Vec5 v5 = cofactor_complement(fd.frames[0].col(c), fd.frames[1].col(c),
                                  fd.frames[2].col(c), fd.frames[3].col(c));
    const double v5n = v5.norm();
    if (v5n < 0.5) {
      throw DegenerateCurvature("frame completion failed at node " +
                                std::to_string(c));
    }
    fd.frames[4].col(c) = v5 / v5n;
  }

  // Curvatures. For arc-length jets the Gram-Schmidt residual norms satisfy
  // k1 = r22, k2 = r33/r22, k3 = r44/r33, and the fifth derivative's V5
  // component gives k4*r44 with its sign. That is the same quantity as
  // <Vi', V_{i+1}> without the stencil noise of differentiating the frames.
  fd.curvature[0] = ScalarSeries(fd.grid, r22);
  fd.curvature[1] = ScalarSeries(fd.grid, r33 / r22);
  fd.curvature[2] = ScalarSeries(fd.grid, r44 / r33);

  const Eigen::Index frame_stride =
      source == JetSource::Exact ? 1 : stride_for(0.02, h, n);
  if (jets->size() >= 5) {
    Eigen::ArrayXd k4(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      k4(c) = (*jets)[4].col(c).dot(fd.frames[4].col(c)) / r44(c);
    }
    fd.curvature[3] = ScalarSeries(fd.grid, k4);
  } else {
    // k4 = <V4', V5> with V4' taken by stencils.
    Mat5X v4p(5, n);
    for (Eigen::Index r = 0; r < 5; ++r) {
      v4p.row(r) = numkit::differentiate_values(
                       fd.frames[3].row(r).transpose().array(), h, 1, frame_stride)
                       .transpose();
    }
    Eigen::ArrayXd k4(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      k4(c) = v4p.col(c).dot(fd.frames[4].col(c));
    }
    fd.curvature[3] = ScalarSeries(fd.grid, k4);
  }

  // A vanishing k4 means the curve sits in a hyperplane; the frame would be
  // fine but every torsion-like ratio downstream divides by it.
  const Eigen::Index margin = std::min<Eigen::Index>(2, (n - 1) / 2);
  const auto k4_interior = fd.curvature[3].values.segment(margin, n - 2 * margin);
  if (k4_interior.abs().maxCoeff() < kDegeneracyTol) {
    throw DegenerateCurvature("curvature k4 vanishes on the whole grid");
  }

  fd.deriv_stride = source == JetSource::Exact ? stride_for(0.01, h, n)
                                               : stride_for(0.1, h, n);
  return fd;
}

ConstancyVerdict check_unit_speed(const CurveSamples& curve, double tol) {
  if (!curve.grid) throw Error("Internal", "curve without a grid");
  Mat5X alpha_prime;
  if (!curve.jets.empty()) {
    alpha_prime = curve.jets[0];
  } else {
    alpha_prime = finite_difference_jets(curve.points, curve.grid->step(), 1)[0];
  }
  ScalarSeries speed(curve.grid, column_norms(alpha_prime));
  return numkit::deviation_from_target(speed, 1.0, tol);
}

double orthonormality_defect(const FrenetData& fd) {
  const Eigen::Index n = fd.grid->size();
  double worst = 0.0;
  Mat5 g;
  for (Eigen::Index c = 0; c < n; ++c) {
    Mat5 frame;
    for (int i = 0; i < 5; ++i) {
      frame.row(i) = fd.frames[static_cast<std::size_t>(i)].col(c).transpose();
    }
    g = frame * frame.transpose() - Mat5::Identity();
    worst = std::max(worst, g.cwiseAbs().maxCoeff());
  }
  return worst;
}

double orientation_defect(const FrenetData& fd) {
  const Eigen::Index n = fd.grid->size();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Mat5 frame;
    for (int i = 0; i < 5; ++i) {
      frame.row(i) = fd.frames[static_cast<std::size_t>(i)].col(c).transpose();
    }
    worst = std::max(worst, std::abs(frame.determinant() - 1.0));
  }
  return worst;
}

Mat5X frame_derivative(const FrenetData& fd, int i) {
  const Eigen::Index n = fd.grid->size();
  const double h = fd.grid->step();
  const Eigen::Index stride =
      fd.provenance == JetSource::Exact ? 1 : stride_for(0.02, h, n);
  Mat5X out(5, n);
  for (Eigen::Index r = 0; r < 5; ++r) {
    out.row(r) = numkit::differentiate_values(
                     fd.V(i).row(r).transpose().array(), h, 1, stride)
                     .transpose();
  }
  return out;
}

Eigen::ArrayXd frenet_equation_residual(const FrenetData& fd) {
  const Eigen::Index n = fd.grid->size();
  std::array<Mat5X, 5> deriv;
  for (int i = 0; i < 5; ++i) {
    deriv[static_cast<std::size_t>(i)] = frame_derivative(fd, i + 1);
  }
  Eigen::ArrayXd residual(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      Vec5 expected = Vec5::Zero();
      if (i > 0) {
        expected -= fd.curvature[static_cast<std::size_t>(i - 1)].values(c) *
                    fd.frames[static_cast<std::size_t>(i - 1)].col(c);
      }
      if (i < 4) {
        expected += fd.curvature[static_cast<std::size_t>(i)].values(c) *
                    fd.frames[static_cast<std::size_t>(i + 1)].col(c);
      }
      worst = std::max(
          worst, (deriv[static_cast<std::size_t>(i)].col(c) - expected).norm());
    }
    residual(c) = worst;
  }
  return residual;
}

CurveSamples reparametrize_arclength(const Eigen::ArrayXd& t_values,
                                     const Mat5X& raw_points) {
  const Grid raw_grid{t_values};  // validates uniformity and size
  const Eigen::Index n = raw_grid.size();
  if (raw_points.cols() != n) {
    throw Error("Internal", "raw points do not match the parameter grid");
  }
  if (!raw_points.allFinite()) {
    throw NonFiniteState("raw points contain non-finite values");
  }
  const double ht = raw_grid.step();

  Mat5X velocity(5, n);
  for (Eigen::Index r = 0; r < 5; ++r) {
    velocity.row(r) =
        numkit::differentiate_values(raw_points.row(r).transpose().array(), ht, 1)
            .transpose();
  }
  const Eigen::ArrayXd speed = column_norms(velocity);
  if (speed.minCoeff() <= 1e-10) {
    throw DegenerateSpeed("curve speed ‖dα/dt‖ ≤ 1e-10 at node " +
                          std::to_string([&] {
                            Eigen::Index idx = 0;
                            speed.minCoeff(&idx);
                            return idx;
                          }()));
  }

  const Eigen::ArrayXd arc = numkit::cumulative_integral_values(speed, ht);
  const double total = arc(n - 1);
  const double hs = total / static_cast<double>(n - 1);

  auto hermite = [](double p0, double p1, double d0, double d1, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * d0 +
           (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * d1;
  };
  auto hermite_deriv = [](double p0, double p1, double d0, double d1, double u) {
    const double u2 = u * u;
    return (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * d0 +
           (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * d1;
  };

  Mat5X out_points(5, n);
  Eigen::Index seg = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double target = std::clamp(hs * static_cast<double>(j), 0.0, total);
    while (seg + 2 < n && arc(seg + 1) < target) ++seg;
    const double l0 = arc(seg);
    const double l1 = arc(seg + 1);
    const double d0 = ht * speed(seg);
    const double d1 = ht * speed(seg + 1);
    double u = std::clamp((target - l0) / (l1 - l0), 0.0, 1.0);
    for (int it = 0; it < 8; ++it) {
      const double f = hermite(l0, l1, d0, d1, u) - target;
      const double df = hermite_deriv(l0, l1, d0, d1, u);
      if (std::abs(df) < 1e-300) break;
      const double step = f / df;
      u = std::clamp(u - step, 0.0, 1.0);
      if (std::abs(step) < 1e-16) break;
    }
    for (Eigen::Index r = 0; r < 5; ++r) {
      out_points(r, j) = hermite(raw_points(r, seg), raw_points(r, seg + 1),
                                 ht * velocity(r, seg), ht * velocity(r, seg + 1), u);
    }
  }

  CurveSamples out;
  out.grid = std::make_shared<Grid>(Grid::uniform(0.0, total, hs));
  out.points = std::move(out_points);

  const ConstancyVerdict speed_check = check_unit_speed(out, 1e-6);
  if (!speed_check.is_constant) {
    throw NotUnitSpeed("arc-length resampling missed unit speed (residual " +
                       std::to_string(speed_check.residual) + ")");
  }
  return out;
}

}  // namespace pentahelix::frenet
