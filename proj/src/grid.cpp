#include <cmath>

#include "pentahelix/types.hpp"

namespace pentahelix {

namespace {
constexpr Eigen::Index kMinSamples = 7;
constexpr double kUniformityTol = 1e-12;  // relative spacing deviation
}  // namespace

Grid::Grid(Eigen::ArrayXd values) : s_(std::move(values)) {
  if (s_.size() < kMinSamples) {
    throw GridTooSmall("need at least 7 samples, got " + std::to_string(s_.size()));
  }
  if (!s_.allFinite()) {
    throw NonFiniteState("grid contains non-finite parameter values");
  }
  const Eigen::Index n = s_.size();
  step_ = (s_(n - 1) - s_(0)) / static_cast<double>(n - 1);
  if (!(step_ > 0.0)) {
    throw NonUniformGrid("grid parameters are not strictly increasing");
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d = s_(i + 1) - s_(i);
    if (!(d > 0.0)) {
      throw NonUniformGrid("grid parameters are not strictly increasing at index " +
                           std::to_string(i));
    }
    if (std::abs(d - step_) > kUniformityTol * std::max(1.0, std::abs(step_)) &&
        std::abs(d - step_) > kUniformityTol * std::abs(s_(n - 1) - s_(0))) {
      throw NonUniformGrid("grid spacing deviates from uniform at index " +
                           std::to_string(i));
    }
  }
}

Grid Grid::uniform(double s0, double s1, double step) {
  if (!(step > 0.0) || !(s1 > s0)) {
    throw NonUniformGrid("uniform grid needs s1 > s0 and step > 0");
  }
  const auto n = static_cast<Eigen::Index>(std::llround((s1 - s0) / step)) + 1;
  if (n < kMinSamples) {
    throw GridTooSmall("need at least 7 samples, got " + std::to_string(n));
  }
  Eigen::ArrayXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = s0 + step * static_cast<double>(i);
  return Grid(std::move(s));
}

ScalarSeries::ScalarSeries(GridPtr g, Eigen::ArrayXd v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw Error("Internal", "ScalarSeries without a grid");
  if (values.size() != grid->size()) {
    throw Error("Internal", "ScalarSeries length does not match its grid");
  }
}

}  // namespace pentahelix
