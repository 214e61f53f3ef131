#include <gtest/gtest.h>

#include <cmath>

#include "rbfm/density.hpp"
#include "rbfm/interpolation.hpp"
#include "rbfm/linalg.hpp"
#include "rbfm/manifold.hpp"
#include "rbfm/projection.hpp"
#include "rbfm/scalar_ops.hpp"
#include "rbfm/spectral.hpp"

using namespace rbfm;

namespace {

struct Circle {
  PointCloud cloud;
  InterpolationSystem sys;
  ScalarOperatorSet ops;
};

Circle circle(int N, const KernelModel& k, SamplingMode mode = SamplingMode::RandomIntrinsic) {
  Circle c{sample_manifold(ManifoldSpec::ellipse(1.0), N, 3, mode), {}, {}};
  c.sys = build_system(c.cloud, k);
  c.ops = build_grad_matrices(c.sys, analytic_projection(c.cloud));
  return c;
}

std::vector<double> smallest_nonzero(const SpectralResult& r, int count) {
  std::vector<double> out;
  for (int i : r.nontrivial(count)) out.push_back(std::abs(r.values(i)));
  return out;
}

}  // namespace

TEST(ScalarOps, GradientOfConstantVanishes) {
  const auto c = circle(400, inverse_quadratic(1.5));
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(400);
  for (int i = 0; i < 2; ++i) EXPECT_LE(c.ops.apply(i, one).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(ScalarOps, GradientOnCircle) {
  const auto c = circle(400, inverse_quadratic(1.5));
  Eigen::VectorXd f(400);
  for (int j = 0; j < 400; ++j) f(j) = std::sin((*c.cloud.intrinsic)(j, 0));
  const Eigen::VectorXd g1 = c.ops.apply(0, f), g2 = c.ops.apply(1, f);
  double worst = 0;
  for (int j = 0; j < 400; ++j) {
    const double t = (*c.cloud.intrinsic)(j, 0);
    worst = std::max({worst, std::abs(g1(j) + std::cos(t) * std::sin(t)), std::abs(g2(j) - std::cos(t) * std::cos(t))});
  }
  EXPECT_LE(worst, 1e-3);
}

TEST(ScalarOps, LinearFunctionOnPlane) {
  Eigen::MatrixXd X(60, 3);
  for (int j = 0; j < 60; ++j) X.row(j) << std::sin(1.3 * j), std::cos(0.7 * j * j), 0.0;
  auto cloud = cloud_from_points(X, 2);
  ProjectionField P;
  P.d = 2;
  P.mats.assign(60, Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix());
  P.flags.assign(60, 0);
  P.gaps.assign(60, 1.0);
  const auto ops = build_grad_matrices(build_system(cloud, gaussian(0.05, 1e-12)), P);
  const Eigen::VectorXd f = 2.0 * X.col(0) - 3.0 * X.col(1) + Eigen::VectorXd::Constant(60, 0.5);
  const Eigen::VectorXd g1 = ops.apply(0, f), g2 = ops.apply(1, f), g3 = ops.apply(2, f);
  EXPECT_LE(g3.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((g1.array() - 2.0).abs().maxCoeff(), 1e-6);
  EXPECT_LE((g2.array() + 3.0).abs().maxCoeff(), 1e-6);
}

TEST(ScalarOps, NonsymmetricCircleSpectrum) {
  const auto c = circle(400, inverse_quadratic(1.5));
  const Eigen::MatrixXd L = laplace_beltrami_nonsymmetric(c.ops);
  EXPECT_LE((L * Eigen::VectorXd::Ones(400)).cwiseAbs().maxCoeff(), 1e-2);
  const auto r = solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(c.ops), 10);
  const auto v = smallest_nonzero(r, 4);
  const std::vector<double> truth{1, 1, 4, 4};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(v[i], truth[i], 1e-2);
  for (int i : r.nontrivial(4)) EXPECT_LE(std::abs(r.values(i).imag()), 1e-3);
}

TEST(ScalarOps, ReducedMatchesDense) {
  const auto c = circle(200, inverse_quadratic(1.5));
  const auto dense = solve_nonsymmetric(laplace_beltrami_nonsymmetric(c.ops), 8);
  const auto red = solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(c.ops), 8);
  const auto a = smallest_nonzero(dense, 6), b = smallest_nonzero(red, 6);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(a[i], b[i], 1e-8 * (1 + a[i]));
}

TEST(ScalarOps, ConstantDensityCancels) {
  const auto c = circle(150, gaussian(1.0));
  const auto pair = laplace_beltrami_symmetric(c.ops, Eigen::VectorXd::Constant(150, 3.0));
  Eigen::MatrixXd GtG = Eigen::MatrixXd::Zero(150, 150);
  for (int i = 0; i < 2; ++i) GtG += c.ops.G(i).transpose() * c.ops.G(i);
  const auto ref = sym_eig(symmetrize(GtG), false);
  const auto r = solve_symmetric(pair, 12, 0.0);
  std::vector<double> got;
  for (int i = 0; i < r.size(); ++i) got.push_back(r.values(i).real());
  std::sort(got.begin(), got.end());
  const double scale = ref.values.maxCoeff();
  for (int i = 0; i < 150; ++i) EXPECT_NEAR(got[i], ref.values(i), 1e-10 * scale);
}

TEST(ScalarOps, SymmetricPencilIsPsdAndOrthogonal) {
  const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 400, 5);
  const auto sys = build_system(cloud, inverse_quadratic(0.5));
  const auto ops = build_grad_matrices(sys, analytic_projection(cloud));
  const auto q = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  const auto pair = laplace_beltrami_symmetric(ops, q);
  EXPECT_EQ(pair.A, pair.A.transpose());
  const double nA = sym_eig(pair.A, false).values.cwiseAbs().maxCoeff();
  EXPECT_GE(sym_eig(pair.A, false).values.minCoeff(), -1e-8 * nA);
  const auto r = solve_symmetric(pair, 40);
  for (int i = 0; i < r.size(); ++i) EXPECT_GE(r.values(i).real(), -1e-8 * nA);
  const Eigen::MatrixXd V = r.real_vectors();
  const Eigen::MatrixXd I = V.transpose() * pair.b.asDiagonal() * V;
  EXPECT_LE((I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ScalarOps, LowRankMatchesDensePencil) {
  const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 400, 5);
  const auto sys = build_system(cloud, inverse_quadratic(0.5));
  const auto ops = build_grad_matrices(sys, analytic_projection(cloud));
  const auto q = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  const auto dense = solve_symmetric(laplace_beltrami_symmetric(ops, q), 20);
  const auto low = solve_symmetric(laplace_beltrami_symmetric_lowrank(ops, q), 20);
  const auto a = smallest_nonzero(dense, 12), b = smallest_nonzero(low, 12);
  for (int i = 0; i < 12; ++i) EXPECT_NEAR(a[i], b[i], 1e-7 * (1 + a[i]));
}

TEST(ScalarOps, FormulationsAgreeOnCircle) {
  const auto c = circle(400, inverse_quadratic(1.5), SamplingMode::Grid);
  const auto q = sampling_density(c.cloud);
  const auto nr = smallest_nonzero(solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(c.ops), 10), 5);
  const auto sr = smallest_nonzero(solve_symmetric(laplace_beltrami_symmetric_lowrank(c.ops, q), 10), 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(nr[i] / sr[i], 1.0, 5e-2);
}

TEST(ScalarOps, ScalingCovariance) {
  auto c = circle(200, inverse_quadratic(1.5));
  const auto q = sampling_density(c.cloud);
  const auto n0 = smallest_nonzero(solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(c.ops), 8), 4);
  const auto s0 = smallest_nonzero(solve_symmetric(laplace_beltrami_symmetric_lowrank(c.ops, q), 8), 4);
  c.ops.scale(3.0);
  const auto n1 = smallest_nonzero(solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(c.ops), 8), 4);
  const auto s1 = smallest_nonzero(solve_symmetric(laplace_beltrami_symmetric_lowrank(c.ops, q), 8), 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(n1[i], 9.0 * n0[i], 1e-8 * n1[i]);
    EXPECT_NEAR(s1[i], 9.0 * s0[i], 1e-8 * s1[i]);
  }
}

TEST(ScalarOps, SphereGridSymmetric) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 1024, 1, SamplingMode::Grid);
  const auto sys = build_system(cloud, inverse_quadratic(0.5));
  const auto ops = build_grad_matrices(sys, analytic_projection(cloud));
  const auto q = estimate_density(cloud, DensityMethod::Analytic).q;
  const auto r = solve_symmetric(laplace_beltrami_symmetric_lowrank(ops, q), 20);
  const auto v = smallest_nonzero(r, 8);
  const std::vector<double> truth{2, 2, 2, 6, 6, 6, 6, 6};
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(v[i] / truth[i], 1.0, 0.15) << i;
}
