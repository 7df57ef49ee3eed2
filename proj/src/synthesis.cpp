#include "pentahelix/synthesis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pentahelix/numkit.hpp"

namespace pentahelix::synthesis {

namespace {

using State25 = Eigen::Matrix<double, 25, 1>;

Mat5 unflatten(const State25& x) {
  Mat5 f;
  for (Eigen::Index i = 0; i < 5; ++i) f.row(i) = x.segment<5>(5 * i).transpose();
  return f;
}

State25 flatten(const Mat5& f) {
  State25 x;
  for (Eigen::Index i = 0; i < 5; ++i) x.segment<5>(5 * i) = f.row(i).transpose();
  return x;
}

void require_orthonormal_frame(const Mat5& frame) {
  const double defect =
      (frame * frame.transpose() - Mat5::Identity()).cwiseAbs().maxCoeff();
  if (defect > 1e-12) {
    throw Error("InvalidSpec", "initial frame is not orthonormal to 1e-12");
  }
}

}  // namespace

Mat5 frenet_matrix(const Vec4& k) {
  Mat5 m = Mat5::Zero();
  for (Eigen::Index i = 0; i < 4; ++i) {
    m(i, i + 1) = k(i);
    m(i + 1, i) = -k(i);
  }
  return m;
}

Mat5 frenet_matrix_at(const CurvatureSpec& spec, double s) {
  Vec4 k;
  for (Eigen::Index i = 0; i < 4; ++i) k(i) = spec.k[static_cast<std::size_t>(i)](s);
  return frenet_matrix(k);
}

frenet::CurveSamples synthesize_w_curve(const WCurveSpec& spec, const Grid& grid) {
  for (Eigen::Index i = 0; i < 4; ++i) {
    if (!(spec.k(i) > 0.0)) {
      throw DegenerateCurvature("W-curve requires k" + std::to_string(i + 1) +
                                " > 0, got " + std::to_string(spec.k(i)));
    }
  }
  require_orthonormal_frame(spec.initial_frame);

  const Mat5 K = frenet_matrix(spec.k);
  const auto [w1, w2] = numkit::frequencies(K);
  const Eigen::Index n = grid.size();
  const double s0 = grid.front();

  frenet::CurveSamples out;
  out.grid = std::make_shared<Grid>(grid);
  out.points.resize(5, n);
  out.jets.assign(5, Mat5X(5, n));

  std::array<Mat5, 5> K_pow;
  K_pow[0] = Mat5::Identity();
  for (int m = 1; m < 5; ++m) K_pow[m] = K * K_pow[m - 1];

  if (std::abs(w2 - w1) < 1e-8 || w1 < 1e-8) {
    // Nearly equal (or tiny) frequencies make the spectral projectors
    // ill-conditioned; step the flow with the matrix exponential instead.
    const Mat5 Eh = numkit::skew_expm(K, grid.step());
    Mat5 frame = spec.initial_frame;
    Mat5X v1(5, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c > 0) frame = Eh * frame;
      for (int m = 0; m < 5; ++m) {
        out.jets[static_cast<std::size_t>(m)].col(c) =
            (K_pow[static_cast<std::size_t>(m)] * frame).row(0).transpose();
      }
      v1.col(c) = frame.row(0).transpose();
    }
    for (Eigen::Index r = 0; r < 5; ++r) {
      out.points.row(r) =
          numkit::cumulative_integral_values(v1.row(r).transpose().array(),
                                             grid.step())
              .transpose();
    }
    out.points.colwise() += spec.initial_point;
    return out;
  }

  // Invariant planes of K from its squared spectrum: K^2 is symmetric with
  // eigenvalues {0, -w1^2, -w2^2}; polynomial projectors avoid any iterative
  // decomposition. The kernel is the classic fixed direction (1, 0, k1/k2,
  // 0, k1 k3/(k2 k4)) in frame coordinates.
  const double w1sq = w1 * w1;
  const double w2sq = w2 * w2;
  const Mat5 K2 = K_pow[2];
  const Mat5 I = Mat5::Identity();
  Vec5 kernel;
  kernel << 1.0, 0.0, spec.k(0) / spec.k(1), 0.0,
      spec.k(0) * spec.k(2) / (spec.k(1) * spec.k(3));
  kernel.normalize();
  const Mat5 P0 = kernel * kernel.transpose();
  const Mat5 P1 = K2 * (K2 + w2sq * I) / (w1sq * (w1sq - w2sq));
  const Mat5 P2 = K2 * (K2 + w1sq * I) / (w2sq * (w2sq - w1sq));
  const Mat5 KP1 = K * P1;
  const Mat5 KP2 = K * P2;

  for (Eigen::Index c = 0; c < n; ++c) {
    const double tau = grid(c) - s0;
    const double c1 = std::cos(w1 * tau), s1 = std::sin(w1 * tau);
    const double c2 = std::cos(w2 * tau), s2 = std::sin(w2 * tau);
    const Mat5 flow = P0 + c1 * P1 + (s1 / w1) * KP1 + c2 * P2 + (s2 / w2) * KP2;
    const Mat5 moved = flow * spec.initial_frame;
    for (int m = 0; m < 5; ++m) {
      out.jets[static_cast<std::size_t>(m)].col(c) =
          (K_pow[static_cast<std::size_t>(m)] * moved).row(0).transpose();
    }
    // Integral of the flow applied to the first frame row gives the position.
    const Mat5 integral = tau * P0 + (s1 / w1) * P1 + ((1.0 - c1) / w1sq) * KP1 +
                          (s2 / w2) * P2 + ((1.0 - c2) / w2sq) * KP2;
    out.points.col(c) =
        spec.initial_point + (integral * spec.initial_frame).row(0).transpose();
  }
  return out;
}

frenet::CurveSamples synthesize_from_curvatures(const CurvatureSpec& spec) {
  const Grid grid = Grid::uniform(spec.s0, spec.s1, spec.step);
  const Eigen::Index n = grid.size();
  const double h = grid.step();

  std::array<Eigen::ArrayXd, 4> k;
  for (auto& arr : k) arr.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < 4; ++i) {
      k[i](c) = spec.k[i](grid(c));
      if (!std::isfinite(k[i](c))) {
        throw NonFiniteState("curvature function k" + std::to_string(i + 1) +
                             " is not finite at s = " + std::to_string(grid(c)));
      }
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(k[i](c) > 0.0)) {
        throw DegenerateCurvature("k" + std::to_string(i + 1) +
                                  " must stay positive; fails at s = " +
                                  std::to_string(grid(c)));
      }
    }
    if (k[3](c) == 0.0) {
      throw DegenerateCurvature("k4 must stay nonzero; fails at s = " +
                                std::to_string(grid(c)));
    }
  }

  const auto rhs = [&spec](double s, const State25& x) -> State25 {
    return flatten(frenet_matrix_at(spec, s) * unflatten(x));
  };
  const std::vector<State25> states =
      numkit::integrate_ode(rhs, flatten(Mat5::Identity()), grid);

  std::array<Mat5X, 5> frames;
  for (auto& f : frames) f.resize(5, n);
  double drift = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Mat5 f = unflatten(states[static_cast<std::size_t>(c)]);
    drift = std::max(drift,
                     (f * f.transpose() - Mat5::Identity()).cwiseAbs().maxCoeff());
    for (int i = 0; i < 5; ++i) {
      frames[static_cast<std::size_t>(i)].col(c) = f.row(i).transpose();
    }
  }
  if (drift > 1e-8) {
    throw Error("OrthonormalityDrift",
                "frame integration drifted to " + std::to_string(drift) +
                    "; reduce the step");
  }

  frenet::CurveSamples out;
  out.grid = std::make_shared<Grid>(grid);

  out.points.resize(5, n);
  for (Eigen::Index r = 0; r < 5; ++r) {
    out.points.row(r) = numkit::cumulative_integral_values(
                            frames[0].row(r).transpose().array(), h)
                            .transpose();
  }

  // Jets from the frame machine; the curvature derivatives come from
  // stencils on the (smooth, closed-form) curvature samples.
  const Eigen::ArrayXd k1p = numkit::differentiate_values(k[0], h, 1);
  const Eigen::ArrayXd k1pp = numkit::differentiate_values(k[0], h, 2);
  const Eigen::ArrayXd k2p = numkit::differentiate_values(k[1], h, 1);

  out.jets.assign(4, Mat5X(5, n));
  for (Eigen::Index c = 0; c < n; ++c) {
    const Vec5 v1 = frames[0].col(c);
    const Vec5 v2 = frames[1].col(c);
    const Vec5 v3 = frames[2].col(c);
    const Vec5 v4 = frames[3].col(c);
    const double K1 = k[0](c), K2 = k[1](c), K3 = k[2](c);
    out.jets[0].col(c) = v1;
    out.jets[1].col(c) = K1 * v2;
    out.jets[2].col(c) = k1p(c) * v2 + K1 * (-K1 * v1 + K2 * v3);
    out.jets[3].col(c) = -3.0 * K1 * k1p(c) * v1 +
                         (k1pp(c) - K1 * (K1 * K1 + K2 * K2)) * v2 +
                         (2.0 * k1p(c) * K2 + K1 * k2p(c)) * v3 +
                         K1 * K2 * K3 * v4;
  }

  out.prescribed_curvature.assign(k.begin(), k.end());
  return out;
}

}  // namespace pentahelix::synthesis
