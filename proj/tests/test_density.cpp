#include <gtest/gtest.h>

#include <cmath>
#include <Eigen/Geometry>
#include <random>

#include "rbfm/density.hpp"
#include "rbfm/manifold.hpp"

using namespace rbfm;

namespace {

Eigen::MatrixXd normal_cloud(int N, int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(N, n);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < n; ++i) X(j, i) = g(gen);
  return X;
}

}  // namespace

TEST(Density, SilvermanClosedForm) {
  const Eigen::MatrixXd X = normal_cloud(1000, 2, 1);
  double sd = 0;
  for (int c = 0; c < 2; ++c) {
    const double m = X.col(c).mean();
    sd += std::sqrt((X.col(c).array() - m).square().sum() / 999.0);
  }
  sd /= 2;
  const double h = silverman_bandwidth(cloud_from_points(X, 2));
  EXPECT_NEAR(h, sd * std::pow(1000.0, -1.0 / 6.0), 1e-14);
  EXPECT_NEAR(h / sd, 0.316, 1e-3);
}

TEST(Density, SilvermanHomogeneousAndMonotone) {
  const Eigen::MatrixXd X = normal_cloud(500, 3, 2);
  const double h = silverman_bandwidth(cloud_from_points(X, 2));
  EXPECT_NEAR(silverman_bandwidth(cloud_from_points(2.5 * X, 2)), 2.5 * h, 1e-13);
  Eigen::MatrixXd XX(1000, 3);
  XX << X, X;
  EXPECT_LT(silverman_bandwidth(cloud_from_points(XX, 2)), h);
}

TEST(Density, IdenticalPointsUniform) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Constant(20, 3, 0.7);
  const auto q = kde_density(cloud_from_points(X, 2), 0.3).q;
  EXPECT_EQ(q.maxCoeff(), q.minCoeff());
  EXPECT_THROW(silverman_bandwidth(cloud_from_points(X, 2)), std::invalid_argument);
}

TEST(Density, TwoClustersSymmetric) {
  const Eigen::MatrixXd A = 0.1 * normal_cloud(200, 2, 3);
  const Eigen::MatrixXd B = 0.1 * normal_cloud(200, 2, 4);
  Eigen::MatrixXd X(400, 2);
  X << A, B.rowwise() + Eigen::RowVector2d(50.0, 0.0);
  const auto est = estimate_density(cloud_from_points(X, 1), DensityMethod::KdeSilverman);
  const double ma = est.q.head(200).mean(), mb = est.q.tail(200).mean();
  EXPECT_NEAR(ma / mb, 1.0, 0.05);
  EXPECT_GT(est.q.minCoeff(), 0.0);
}

TEST(Density, TorusRankCorrelation) {
  const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 2500, 5);
  const auto kde = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  const auto exact = sampling_density(cloud);
  EXPECT_GE(spearman_correlation(kde, exact), 0.8);
}

TEST(Density, PermutationAndRigidMotion) {
  const auto cloud = sample_manifold(ManifoldSpec::sphere(), 300, 6);
  const double h = 0.2;
  const auto q = kde_density(cloud, h).q;
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(300);
  perm.setIdentity();
  std::mt19937 gen(7);
  std::shuffle(perm.indices().data(), perm.indices().data() + 300, gen);
  const auto qp = kde_density(cloud_from_points(perm * cloud.points, 2), h).q;
  EXPECT_LE((qp - perm * q).cwiseAbs().maxCoeff(), 1e-12 * q.maxCoeff());
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Eigen::MatrixXd moved = (cloud.points * R.transpose()).rowwise() + Eigen::RowVector3d(3, -1, 2);
  const auto qm = kde_density(cloud_from_points(moved, 2), h).q;
  EXPECT_LE((qm - q).cwiseAbs().maxCoeff(), 1e-10 * q.maxCoeff());
}

TEST(Density, Dispatch) {
  const auto cloud = sample_manifold(ManifoldSpec::flat_torus(2, 1), 100, 1);
  const auto u = estimate_density(cloud, DensityMethod::Uniform).q;
  EXPECT_NEAR(u(0), 1.0 / (4 * M_PI * M_PI), 1e-15);
  EXPECT_EQ(density_method_from_string(to_string(DensityMethod::Analytic)), DensityMethod::Analytic);
}
