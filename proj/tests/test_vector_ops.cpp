#include <gtest/gtest.h>

#include <cmath>

#include "rbfm/density.hpp"
#include "rbfm/interpolation.hpp"
#include "rbfm/linalg.hpp"
#include "rbfm/manifold.hpp"
#include "rbfm/projection.hpp"
#include "rbfm/scalar_ops.hpp"
#include "rbfm/spectral.hpp"
#include "rbfm/tangent.hpp"
#include "rbfm/truth.hpp"
#include "rbfm/vector_ops.hpp"

using namespace rbfm;

namespace {

struct Plane {
  Eigen::MatrixXd X;
  InterpolationSystem sys;
  VectorOperatorSet v;
};

Plane plane(int N) {
  Plane p;
  p.X.resize(N, 3);
  for (int j = 0; j < N; ++j) p.X.row(j) << std::sin(1.3 * j), std::cos(0.7 * j * j), 0.0;
  ProjectionField P;
  P.d = 2;
  P.mats.assign(N, Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix());
  P.flags.assign(N, 0);
  P.gaps.assign(N, 1.0);
  p.sys = build_system(cloud_from_points(p.X, 2), inverse_quadratic(0.05, 1e-12));
  p.v = build_vector_ops(build_grad_matrices(p.sys, P), P);
  return p;
}

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  Eigen::VectorXd u(a.size() * 3);
  u << a, b, c;
  return u;
}

}  // namespace

TEST(VectorOps, ConstantFieldOnPlane) {
  const auto p = plane(60);
  const Eigen::VectorXd U = stack(Eigen::VectorXd::Constant(60, 0.6), Eigen::VectorXd::Constant(60, -0.8),
                                  Eigen::VectorXd::Zero(60));
  for (int i = 0; i < 3; ++i) EXPECT_LE(p.v.apply_H(i, U).cwiseAbs().maxCoeff(), 1e-6);
  const Eigen::VectorXd W = stack(p.X.col(0), p.X.col(1), Eigen::VectorXd::Zero(60));
  EXPECT_LE(covariant_derivative(p.v, p.sys, W, U).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(VectorOps, ProjectionKillsNormalField) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 300, 4);
  const auto P = analytic_projection(cloud);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, gaussian(1.0)), P), P);
  const Eigen::VectorXd U = stack(cloud.points.col(0), cloud.points.col(1), cloud.points.col(2));
  EXPECT_LE(v.apply_P(U).norm(), 1e-8 * U.norm());
  const Eigen::MatrixXd Z = v.range_basis();
  EXPECT_LE((Z.transpose() * Z - Eigen::MatrixXd::Identity(Z.cols(), Z.cols())).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((v.apply_P(Z) - Z).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(VectorOps, EllipseGradientTensor) {
  const auto spec = ManifoldSpec::ellipse(2.0);
  const auto cloud = sample_manifold(spec, 400, 7);
  const auto P = analytic_projection(cloud);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, gaussian(1.5)), P), P);
  const auto t = ellipse_field_truth(spec, *cloud.intrinsic);
  for (int i = 0; i < 2; ++i) EXPECT_LE((v.apply_H(i, t.U) - t.grad.col(i)).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(VectorOps, MaterializedMatchesApplied) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 80, 2);
  const auto P = analytic_projection(cloud);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, gaussian(1.0)), P), P);
  const Eigen::VectorXd X = Eigen::VectorXd::LinSpaced(240, -1.0, 2.0).array().sin();
  for (auto kind : {VectorLaplacian::Bochner, VectorLaplacian::Hodge, VectorLaplacian::Lichnerowicz}) {
    const Eigen::VectorXd a = vector_laplacian_nonsymmetric(kind, v) * X;
    const Eigen::VectorXd b = vector_laplacian_apply(kind, v, X);
    EXPECT_LE((a - b).norm(), 1e-10 * b.norm());
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE((v.H(i) * X - v.apply_H(i, X)).norm(), 1e-10 * (1 + X.norm()));
    EXPECT_LE((v.S(i) * X - v.apply_S(i, X)).norm(), 1e-10 * (1 + X.norm()));
  }
}

TEST(VectorOps, SymmetricPencilProperties) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 200, 3);
  const auto P = analytic_projection(cloud);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, inverse_quadratic(0.5)), P), P);
  const auto q = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  for (auto kind : {VectorLaplacian::Bochner, VectorLaplacian::Hodge, VectorLaplacian::Lichnerowicz}) {
    const auto rp = vector_laplacian_symmetric(kind, v, q);
    EXPECT_EQ(rp.pair.A, rp.pair.A.transpose());
    const double scale = sym_eig(rp.pair.A, false).values.cwiseAbs().maxCoeff();
    const auto r = solve_restricted(rp, 30);
    for (int i = 0; i < r.size(); ++i) EXPECT_GE(r.values(i).real(), -1e-8 * scale);
    const Eigen::MatrixXd V = r.real_vectors();
    for (int k = 0; k < V.cols(); ++k) {
      if (r.trivial[k]) continue;
      EXPECT_LE((V.col(k) - v.apply_P(V.col(k))).norm(), 1e-6 * V.col(k).norm());
    }
    // B-orthogonality on the restricted pencil
    const Eigen::MatrixXd Y = rp.Z.transpose() * V;
    const Eigen::MatrixXd G = Y.transpose() * rp.pair.b.asDiagonal() * Y;
    EXPECT_LE((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(VectorOps, LowRankMatchesRestricted) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 200, 3);
  const auto P = analytic_projection(cloud);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, inverse_quadratic(0.5)), P), P);
  const auto q = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  for (auto kind : {VectorLaplacian::Bochner, VectorLaplacian::Hodge}) {
    const auto a = solve_restricted(vector_laplacian_symmetric(kind, v, q), 40, 1e-7);
    const auto b = solve_restricted(vector_laplacian_symmetric_lowrank(kind, v, q), 40, 1e-7, 0.0);
    std::vector<double> x, y;
    for (int i = 0; i < a.size(); ++i)
      if (!a.trivial[i]) x.push_back(a.values(i).real());
    for (int i = 0; i < b.size(); ++i)
      if (!b.trivial[i]) y.push_back(b.values(i).real());
    ASSERT_GE(std::min(x.size(), y.size()), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(x[i], y[i], 1e-6 * (1 + x[i]));
  }
}

TEST(VectorOps, SphereHodgeBochnerShift) {
  const auto spec = ManifoldSpec::sphere();
  const auto cloud = sample_manifold(spec, 1024, 1, SamplingMode::RandomVolume);
  const auto P = second_order_svd(cloud, 40, 2);
  const auto v = build_vector_ops(build_grad_matrices(build_system(cloud, gaussian(1.0, 1e-10)), P), P);
  const auto tb = vector_eigen_truth(spec, VectorLaplacian::Bochner).expanded(16);
  const auto th = vector_eigen_truth(spec, VectorLaplacian::Hodge).expanded(16);
  const auto b = matched_estimates(solve_nonsymmetric(vector_laplacian_nonsymmetric_reduced(VectorLaplacian::Bochner, v), -1), tb);
  const auto h = matched_estimates(solve_nonsymmetric(vector_laplacian_nonsymmetric_reduced(VectorLaplacian::Hodge, v), -1), th);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(h[i] - b[i], 1.0, 0.1) << i;
}
