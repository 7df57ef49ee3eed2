#pragma once

#include <array>
#include <functional>

#include "pentahelix/frenet.hpp"
#include "pentahelix/types.hpp"

namespace pentahelix::synthesis {

/// Curve with constant curvatures, generated in closed form from the flow
/// of its (constant) Frenet matrix.
struct WCurveSpec {
  Vec4 k;                                    // k1..k4, all positive
  Mat5 initial_frame = Mat5::Identity();     // rows V1..V5, orthonormal
  Vec5 initial_point = Vec5::Zero();
};

/// Curve with prescribed curvature functions, generated by integrating the
/// frame system and quadrature of the tangent.
struct CurvatureSpec {
  std::array<std::function<double(double)>, 4> k;  // k1..k3 > 0, k4 != 0
  double s0 = 0.0;
  double s1 = 10.0;
  double step = 1e-3;
};

/// The skew coefficient matrix of the Frenet system for curvatures k.
Mat5 frenet_matrix(const Vec4& k);

/// Evaluate the Frenet matrix of a CurvatureSpec at parameter s.
Mat5 frenet_matrix_at(const CurvatureSpec& spec, double s);

/// Closed-form W-curve with exact jets (five derivatives per node).
frenet::CurveSamples synthesize_w_curve(const WCurveSpec& spec, const Grid& grid);

/// Prescribed-curvature curve: frames by RK4 on the 25-dimensional frame
/// system, position by quadrature of V1, jets from the frame and curvature
/// derivatives. The prescribed curvatures are attached for round-trip tests.
frenet::CurveSamples synthesize_from_curvatures(const CurvatureSpec& spec);

}  // namespace pentahelix::synthesis
