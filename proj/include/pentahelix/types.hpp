#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace pentahelix {

using Vec5  = Eigen::Matrix<double, 5, 1>;
using Mat5  = Eigen::Matrix<double, 5, 5>;
using Mat5X = Eigen::Matrix<double, 5, Eigen::Dynamic>;
using Vec4  = Eigen::Matrix<double, 4, 1>;

/// Base class for all typed errors. `kind()` is the stable machine-readable
/// name used in CLI messages and exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct GridTooSmall : Error {
  explicit GridTooSmall(const std::string& w) : Error("GridTooSmall", w) {}
};
struct NonUniformGrid : Error {
  explicit NonUniformGrid(const std::string& w) : Error("NonUniformGrid", w) {}
};
struct NonFiniteState : Error {
  explicit NonFiniteState(const std::string& w) : Error("NonFiniteState", w) {}
};
struct NotSkew : Error {
  explicit NotSkew(const std::string& w) : Error("NotSkew", w) {}
};
struct DegenerateCurvature : Error {
  explicit DegenerateCurvature(const std::string& w) : Error("DegenerateCurvature", w) {}
};
struct NotUnitSpeed : Error {
  explicit NotUnitSpeed(const std::string& w) : Error("NotUnitSpeed", w) {}
};
struct DegenerateSpeed : Error {
  explicit DegenerateSpeed(const std::string& w) : Error("DegenerateSpeed", w) {}
};
struct AxisNotConstant : Error {
  explicit AxisNotConstant(const std::string& w) : Error("AxisNotConstant", w) {}
};
struct IllConditionedFit : Error {
  explicit IllConditionedFit(const std::string& w) : Error("IllConditionedFit", w) {}
};
struct InternalInconsistency : Error {
  explicit InternalInconsistency(const std::string& w) : Error("InternalInconsistency", w) {}
};
struct ImplicationViolated : Error {
  explicit ImplicationViolated(const std::string& w) : Error("ImplicationViolated", w) {}
};

/// Error re-thrown by pipeline drivers, tagged with the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.kind(), "stage " + stage + ": " + inner.what()),
        stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Uniform, strictly increasing arc-length (or raw parameter) grid.
/// At least 7 samples so the fourth-order stencils are well defined.
class Grid {
 public:
  explicit Grid(Eigen::ArrayXd values);
  static Grid uniform(double s0, double s1, double step);

  const Eigen::ArrayXd& s() const noexcept { return s_; }
  double step() const noexcept { return step_; }
  Eigen::Index size() const noexcept { return s_.size(); }
  double front() const { return s_(0); }
  double back() const { return s_(s_.size() - 1); }
  double operator()(Eigen::Index i) const { return s_(i); }

 private:
  Eigen::ArrayXd s_;
  double step_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Sampled scalar function sharing a grid.
struct ScalarSeries {
  GridPtr grid;
  Eigen::ArrayXd values;

  ScalarSeries() = default;
  ScalarSeries(GridPtr g, Eigen::ArrayXd v);

  Eigen::Index size() const noexcept { return values.size(); }
  double step() const { return grid->step(); }
};

/// Outcome of a numeric "is this sampled function constant" decision.
/// residual = max interior |value - mean| / max(1, |mean|).
struct ConstancyVerdict {
  bool is_constant = false;
  double mean = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
};

enum class JetSource { Exact, FiniteDifference };

inline const char* to_string(JetSource s) {
  return s == JetSource::Exact ? "exact" : "finite-difference";
}

/// Tolerance configuration shared by the classification pipeline.
struct Tolerances {
  double constancy = 1e-6;   // constancy tests on synthesized curves, step 1e-3
  double fd_floor = 2e-3;    // minimum tolerance once jets come from finite differences
  double axis_factor = 10.0; // axis residual allowance = axis_factor * constancy
  double unit_speed = 1e-6;  // |‖α′‖ − 1| admitted before extraction refuses

  double effective(JetSource source) const {
    return source == JetSource::FiniteDifference
               ? (constancy < fd_floor ? fd_floor : constancy)
               : constancy;
  }
};

}  // namespace pentahelix
