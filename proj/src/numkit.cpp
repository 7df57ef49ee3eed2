#include "pentahelix/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace pentahelix::numkit {

namespace {

void require_series(const ScalarSeries& series) {
  if (!series.grid) throw Error("Internal", "series without a grid");
  if (series.size() < 7) {
    throw GridTooSmall("series has " + std::to_string(series.size()) +
                       " samples, need at least 7");
  }
  if (!series.values.allFinite()) {
    throw NonFiniteState("series contains non-finite values");
  }
}

}  // namespace

Eigen::VectorXd fornberg_weights(const Eigen::VectorXd& offsets, int order) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988). Weights for d^m/dx^m at x = 0.
  const int n = static_cast<int>(offsets.size());
  if (order < 0 || n < order + 1) {
    throw Error("Internal", "not enough stencil nodes for requested derivative");
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, order + 1);
  double c1 = 1.0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    double c2 = 1.0;
    const int mn = std::min(i, order);
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets(i) - offsets(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c(i, k) = c1 * (k * c(i - 1, k - 1) - offsets(i - 1) * c(i - 1, k)) / c2;
        }
        c(i, 0) = -c1 * offsets(i - 1) * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c(j, k) = (offsets(i) * c(j, k) - k * c(j, k - 1)) / c3;
      }
      c(j, 0) = offsets(i) * c(j, 0) / c3;
    }
    c1 = c2;
  }
  Eigen::VectorXd w = c.col(order);
  if (order >= 1) {
    // A derivative stencil annihilates constants; force the zero sum exactly
    // by absorbing the eps-level closure error into the largest weight.
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    w(imax) -= w.sum();
  }
  return w;
}

Eigen::ArrayXd differentiate_values(const Eigen::ArrayXd& values, double h,
                                    int order, Eigen::Index stride) {
  if (order != 1 && order != 2) {
    throw Error("Internal", "differentiate supports orders 1 and 2 only");
  }
  const Eigen::Index n = values.size();
  if (n < 7) {
    throw GridTooSmall("need at least 7 samples to differentiate, got " +
                       std::to_string(n));
  }
  if (!values.allFinite()) throw NonFiniteState("differentiating non-finite values");
  stride = std::max<Eigen::Index>(1, stride);
  while (stride > 1 && 5 * stride > n - 1) --stride;

  // Central 5-point stencils are fourth order for both derivatives; a shifted
  // 5-point window drops to third order for the second derivative, so shifted
  // second-derivative windows use 6 points.
  const Eigen::Index central_width = 5;
  const Eigen::Index shifted_width = (order == 2) ? 6 : 5;
  const double he = h * static_cast<double>(stride);

  // Weights depend only on the node's displacement inside its window; cache
  // the handful of shapes that occur (one central, a few per boundary band).
  struct CachedWeights {
    Eigen::Index key = -1;
    Eigen::VectorXd w;
  };
  std::vector<CachedWeights> cache;

  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool central = i >= 2 * stride && i + 2 * stride < n;
    const Eigen::Index width = central ? central_width : shifted_width;
    Eigen::Index start = central ? i - 2 * stride : i - (width / 2) * stride;
    start = std::clamp<Eigen::Index>(start, 0, n - 1 - (width - 1) * stride);
    const Eigen::Index key = (i - start) * 16 + width;
    const Eigen::VectorXd* w = nullptr;
    for (const auto& entry : cache) {
      if (entry.key == key) {
        w = &entry.w;
        break;
      }
    }
    if (!w) {
      Eigen::VectorXd offsets(width);
      for (Eigen::Index j = 0; j < width; ++j) {
        offsets(j) = static_cast<double>(start + j * stride - i) /
                     static_cast<double>(stride);
      }
      cache.push_back({key, fornberg_weights(offsets, order)});
      w = &cache.back().w;
    }
    // Apply to differences against the node's own value: exact on constants
    // and less cancellation on smooth data (the weights sum to zero).
    double acc = 0.0;
    for (Eigen::Index j = 0; j < width; ++j) {
      acc += (*w)(j) * (values(start + j * stride) - values(i));
    }
    out(i) = acc / std::pow(he, order);
  }
  return out;
}

ScalarSeries differentiate(const ScalarSeries& series, int order, Eigen::Index stride) {
  require_series(series);
  if (order != 1 && order != 2) {
    throw Error("Internal", "differentiate supports orders 1 and 2 only");
  }
  return {series.grid,
          differentiate_values(series.values, series.step(), order, stride)};
}

Eigen::ArrayXd nth_derivative_values(const Eigen::ArrayXd& values, double h,
                                     int order, Eigen::Index stride) {
  const Eigen::Index n = values.size();
  const Eigen::Index width = order + 5;
  if ((width - 1) > n - 1) {
    throw GridTooSmall("need at least " + std::to_string(width) +
                       " samples for derivative order " + std::to_string(order));
  }
  if (!values.allFinite()) throw NonFiniteState("differentiating non-finite values");
  stride = std::max<Eigen::Index>(1, std::min(stride, (n - 1) / (width - 1)));
  const double he = h * static_cast<double>(stride);
  const Eigen::Index half = (width - 1) / 2;

  struct CachedWeights {
    Eigen::Index key = -1;
    Eigen::VectorXd w;
  };
  std::vector<CachedWeights> cache;

  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index start =
        std::clamp<Eigen::Index>(i - half * stride, 0, n - 1 - (width - 1) * stride);
    const Eigen::Index key = i - start;
    const Eigen::VectorXd* w = nullptr;
    for (const auto& entry : cache) {
      if (entry.key == key) {
        w = &entry.w;
        break;
      }
    }
    if (!w) {
      Eigen::VectorXd offsets(width);
      for (Eigen::Index j = 0; j < width; ++j) {
        offsets(j) = static_cast<double>(start + j * stride - i) /
                     static_cast<double>(stride);
      }
      cache.push_back({key, fornberg_weights(offsets, order)});
      w = &cache.back().w;
    }
    double acc = 0.0;
    for (Eigen::Index j = 0; j < width; ++j) {
      acc += (*w)(j) * (values(start + j * stride) - values(i));
    }
    out(i) = acc / std::pow(he, order);
  }
  return out;
}

namespace {

ConstancyVerdict verdict_about(const ScalarSeries& series, double tolerance,
                               Eigen::Index margin, const double* target) {
  require_series(series);
  if (!(tolerance > 0.0)) throw Error("Internal", "tolerance must be positive");
  margin = std::max<Eigen::Index>(2, margin);
  const Eigen::Index n = series.size();
  if (n <= 2 * margin) {
    throw GridTooSmall("series of " + std::to_string(n) +
                       " samples leaves no interior for margin " +
                       std::to_string(margin));
  }
  const auto interior = series.values.segment(margin, n - 2 * margin);
  ConstancyVerdict v;
  v.tolerance = tolerance;
  v.mean = interior.mean();
  const double center = target ? *target : v.mean;
  v.residual = (interior - center).abs().maxCoeff() / std::max(1.0, std::abs(center));
  v.is_constant = v.residual <= tolerance;
  return v;
}

}  // namespace

ConstancyVerdict constancy(const ScalarSeries& series, double tolerance,
                           Eigen::Index margin) {
  return verdict_about(series, tolerance, margin, nullptr);
}

ConstancyVerdict deviation_from_target(const ScalarSeries& series, double target,
                                       double tolerance, Eigen::Index margin) {
  return verdict_about(series, tolerance, margin, &target);
}

Eigen::ArrayXd cumulative_integral_values(const Eigen::ArrayXd& f, double h) {
  const Eigen::Index n = f.size();
  if (n < 4) throw GridTooSmall("cumulative integral needs at least 4 samples");
  if (!f.allFinite()) throw NonFiniteState("integrating non-finite values");
  Eigen::ArrayXd out(n);
  out(0) = 0.0;
  // Integral over [s_{i-1}, s_i] of the cubic through the four nearest nodes.
  out(1) = out(0) + h / 24.0 * (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3));
  for (Eigen::Index i = 2; i + 1 < n; ++i) {
    out(i) = out(i - 1) +
             h / 24.0 * (-f(i - 2) + 13.0 * f(i - 1) + 13.0 * f(i) - f(i + 1));
  }
  out(n - 1) = out(n - 2) + h / 24.0 * (f(n - 4) - 5.0 * f(n - 3) +
                                        19.0 * f(n - 2) + 9.0 * f(n - 1));
  return out;
}

ScalarSeries cumulative_integral(const ScalarSeries& f) {
  require_series(f);
  return {f.grid, cumulative_integral_values(f.values, f.step())};
}

namespace {

double skew_defect(const Mat5& K) { return (K + K.transpose()).cwiseAbs().maxCoeff(); }

Mat5 pade13_expm(const Mat5& A) {
  // Degree-13 Padé coefficients (Higham 2005).
  static constexpr double b[14] = {64764752532480000.0, 32382376266240000.0,
                                   7771770303897600.0,  1187353796428800.0,
                                   129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,
                                   1323241920.0,        40840800.0,
                                   960960.0,            16380.0,
                                   182.0,               1.0};
  const Mat5 I = Mat5::Identity();
  const Mat5 A2 = A * A;
  const Mat5 A4 = A2 * A2;
  const Mat5 A6 = A4 * A2;
  const Mat5 U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
                      b[5] * A4 + b[3] * A2 + b[1] * I);
  const Mat5 V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                 b[4] * A4 + b[2] * A2 + b[0] * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

Mat5 skew_expm(const Mat5& K, double t) {
  if (skew_defect(K) > 1e-12) {
    throw NotSkew("matrix is not skew-symmetric to 1e-12");
  }
  Mat5 A = t * K;
  const double theta13 = 5.371920351148152;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    A /= std::pow(2.0, squarings);
  }
  Mat5 E = pade13_expm(A);
  for (int i = 0; i < squarings; ++i) E = Mat5(E * E);
  return E;
}

std::pair<double, double> frequencies(const Mat5& K) {
  if (skew_defect(K) > 1e-12) {
    throw NotSkew("matrix is not skew-symmetric to 1e-12");
  }
  // The real Schur form of a skew matrix is block diagonal with 2x2 rotation
  // generators; the frequencies sit on the antidiagonals of those blocks.
  Eigen::RealSchur<Mat5> schur(K, /*computeU=*/false);
  const Mat5& T = schur.matrixT();
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  std::vector<double> omega;
  for (Eigen::Index i = 0; i + 1 < 5; ++i) {
    if (std::abs(T(i + 1, i)) > 1e-14 * scale) {
      const double prod = -T(i, i + 1) * T(i + 1, i);
      omega.push_back(std::sqrt(std::max(0.0, prod)));
      ++i;
    }
  }
  while (omega.size() < 2) omega.push_back(0.0);
  std::sort(omega.begin(), omega.end());
  return {omega[0], omega[1]};
}

}  // namespace pentahelix::numkit
