#pragma once

#include <utility>
#include <vector>

#include "pentahelix/types.hpp"

namespace pentahelix::numkit {

/// Finite-difference weights for the `order`-th derivative at x = 0, given
/// the node offsets (Fornberg's recursion). Offsets need not be symmetric,
/// which is how shifted stencils near grid boundaries are generated.
Eigen::VectorXd fornberg_weights(const Eigen::VectorXd& offsets, int order);

/// Fourth-order differentiation of a sampled function. Interior nodes use
/// central stencils of spacing stride*h; nodes closer than 2*stride to an
/// end use shifted (one-sided) stencils of the same order. A stride above 1
/// trades truncation error for noise suppression when the samples themselves
/// carry eps-level jitter; stride 1 is the plain fourth-order scheme.
Eigen::ArrayXd differentiate_values(const Eigen::ArrayXd& values, double h,
                                    int order, Eigen::Index stride = 1);

/// Same, wrapped on a grid-carrying series. order must be 1 or 2.
ScalarSeries differentiate(const ScalarSeries& series, int order,
                           Eigen::Index stride = 1);

/// Strided stencil derivative of arbitrary order with an (order+5)-point
/// window, shifted as needed near the ends. Backs the finite-difference
/// jet reconstruction, where third and fourth derivatives need wide spacing
/// to stay above the rounding floor.
Eigen::ArrayXd nth_derivative_values(const Eigen::ArrayXd& values, double h,
                                     int order, Eigen::Index stride);

/// Constancy decision: mean over interior nodes (`margin` excluded per end,
/// at least 2 so stencil edge error never votes), residual = max interior
/// |v - mean| / max(1, |mean|).
ConstancyVerdict constancy(const ScalarSeries& series, double tolerance,
                           Eigen::Index margin = 2);

/// Deviation from a prescribed target instead of the sample mean; the mean
/// is still reported. Used for the unit-speed check where the target is 1.
ConstancyVerdict deviation_from_target(const ScalarSeries& series, double target,
                                       double tolerance, Eigen::Index margin = 2);

/// Cumulative integral with I[0] = 0, fourth-order: each interval is
/// integrated with the cubic through its four nearest nodes.
Eigen::ArrayXd cumulative_integral_values(const Eigen::ArrayXd& f, double h);
ScalarSeries cumulative_integral(const ScalarSeries& f);

/// Classical fixed-step RK4 over the grid nodes for x' = rhs(s, x).
/// Returns the state at every node; throws NonFiniteState on NaN/Inf.
template <class State, class Rhs>
std::vector<State> integrate_ode(Rhs&& rhs, const State& initial, const Grid& grid) {
  const Eigen::Index n = grid.size();
  const double h = grid.step();
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(n));
  State x = initial;
  out.push_back(x);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double s = grid(i);
    const State d1 = rhs(s, x);
    const State d2 = rhs(s + 0.5 * h, State(x + 0.5 * h * d1));
    const State d3 = rhs(s + 0.5 * h, State(x + 0.5 * h * d2));
    const State d4 = rhs(s + h, State(x + h * d3));
    x += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
    if (!x.allFinite()) {
      throw NonFiniteState("ODE state became non-finite at s = " +
                           std::to_string(grid(i + 1)));
    }
    out.push_back(x);
  }
  return out;
}

/// exp(t*K) for skew-symmetric K via scaling-and-squaring with a degree-13
/// Padé core. The result is orthogonal to machine precision.
Mat5 skew_expm(const Mat5& K, double t);

/// The two positive rotation frequencies of a 5x5 skew matrix: eig(K) =
/// {0, ±i w1, ±i w2}. Returned sorted ascending.
std::pair<double, double> frequencies(const Mat5& K);

}  // namespace pentahelix::numkit
