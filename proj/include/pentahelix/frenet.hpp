#pragma once

#include <array>
#include <vector>

#include "pentahelix/types.hpp"

namespace pentahelix::frenet {

/// A sampled unit-speed curve in E^5. `points` holds one column per grid
/// node. `jets`, when present, holds derivative samples: jets[j] is the
/// (j+1)-th derivative of the curve (4 or 5 entries). Synthesized curves
/// carry jets; curves read from files or resampled do not, and their
/// derivatives are reconstructed with finite differences.
struct CurveSamples {
  GridPtr grid;
  Mat5X points;
  std::vector<Mat5X> jets;
  // Prescribed curvature samples, attached by synthesis for round-trip tests.
  std::vector<Eigen::ArrayXd> prescribed_curvature;

  JetSource jet_source() const {
    return jets.empty() ? JetSource::FiniteDifference : JetSource::Exact;
  }
};

/// Orthonormal moving frame {V1..V5} and curvatures {k1..k4} per node.
/// frames[i] holds V_{i+1} as one column per node. k4 keeps the sign given
/// by the positive-determinant orientation of V5; k1..k3 are positive.
struct FrenetData {
  GridPtr grid;
  std::array<Mat5X, 5> frames;
  std::array<ScalarSeries, 4> curvature;
  JetSource provenance = JetSource::Exact;
  // Stride downstream series derivatives should use; widened for
  // finite-difference provenance where the samples carry stencil noise.
  Eigen::Index deriv_stride = 1;

  const Mat5X& V(int i) const { return frames[static_cast<std::size_t>(i - 1)]; }
  const ScalarSeries& k(int i) const {
    return curvature[static_cast<std::size_t>(i - 1)];
  }
};

/// Build the Frenet frame field and curvatures of a sampled curve.
/// V1 = α′, V2..V4 by Gram-Schmidt of the higher derivatives, V5 completes
/// the frame with det[V1..V5] = +1. Throws NotUnitSpeed if ‖α′‖ strays from
/// 1 by more than `unit_speed_tol`, DegenerateCurvature if the derivatives
/// fail to span four directions at some node.
FrenetData extract_frames(const CurveSamples& curve, double unit_speed_tol = 1e-6);

/// Resample a curve given in an arbitrary (uniform) parameter onto a uniform
/// arc-length grid: cumulative arc length by fourth-order quadrature of the
/// speed, inversion and position by cubic Hermite interpolation.
CurveSamples reparametrize_arclength(const Eigen::ArrayXd& t_values,
                                     const Mat5X& raw_points);

/// Deviation of ‖α′‖ from 1.
ConstancyVerdict check_unit_speed(const CurveSamples& curve, double tol = 1e-6);

/// Max per-node orthonormality defect ‖V V^T − I‖_max (frames as rows).
double orthonormality_defect(const FrenetData& fd);

/// Max per-node determinant deviation from +1.
double orientation_defect(const FrenetData& fd);

/// Per-node max over i of ‖V_i′ + k_{i-1} V_{i-1} − k_i V_{i+1}‖ with the
/// frame derivatives taken by stencils (k_0 = k_5 = 0). Diagnostic for the
/// discrete Frenet equations.
Eigen::ArrayXd frenet_equation_residual(const FrenetData& fd);

/// Stencil derivative of frame vector V_i along the grid, with the stride
/// the provenance calls for.
Mat5X frame_derivative(const FrenetData& fd, int i);

/// Derivative jets of a sampled point path by strided stencils, first
/// `max_order` derivatives. Strides widen with the order to balance
/// truncation against rounding noise. Internal building block, exposed for
/// tests.
std::vector<Mat5X> finite_difference_jets(const Mat5X& points, double h,
                                          int max_order);

}  // namespace pentahelix::frenet
