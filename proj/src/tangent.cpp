#include "rbfm/tangent.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rbfm {

namespace {

std::vector<int> nearest(const MatrixXd& ref, const Eigen::RowVectorXd& q, int K, int skip_index) {
  const int N = static_cast<int>(ref.rows());
  std::vector<std::pair<double, int>> dist;
  dist.reserve(N);
  for (int j = 0; j < N; ++j) {
    if (j == skip_index) continue;
    const double r2 = (ref.row(j) - q).squaredNorm();
    if (skip_index < 0 && r2 == 0.0) continue;
    dist.emplace_back(r2, j);
  }
  if (static_cast<int>(dist.size()) < K) throw std::invalid_argument("knn: fewer candidates than K");
  std::partial_sort(dist.begin(), dist.begin() + K, dist.end());
  std::vector<int> idx(K);
  for (int k = 0; k < K; ++k) idx[k] = dist[k].second;
  return idx;
}

MatrixXd differences(const MatrixXd& ref, const Eigen::RowVectorXd& x, const std::vector<int>& idx) {
  MatrixXd D(ref.cols(), idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) D.col(k) = (ref.row(idx[k]) - x).transpose();
  return D;
}

void check_K(int K, int d, int N, ProjectionSource order) {
  if (K >= N) throw std::invalid_argument("tangent estimation: K must be smaller than N");
  if (K < d + 1) throw std::invalid_argument("tangent estimation: K must be at least d+1");
  if (order == ProjectionSource::SecondOrder && K <= d * (d + 1) / 2)
    throw std::invalid_argument("second-order estimation: K must exceed d(d+1)/2");
}

}  // namespace

std::vector<std::vector<int>> knn(const MatrixXd& reference, const MatrixXd& queries, int K) {
  std::vector<std::vector<int>> out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i) out[i] = nearest(reference, queries.row(i), K, -1);
  return out;
}

std::vector<std::vector<int>> knn_self(const MatrixXd& points, int K) {
  std::vector<std::vector<int>> out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = nearest(points, points.row(i), K, static_cast<int>(i));
  return out;
}

int default_tangent_K(int d) { return d == 2 ? 40 : std::max(40, 3 * d * (d + 1)); }

LocalFit local_first_order(const MatrixXd& D, int d) {
  Eigen::JacobiSVD<MatrixXd> svd(D, Eigen::ComputeThinU);
  const VectorXd& s = svd.singularValues();
  LocalFit fit;
  fit.P = projector_from_basis(svd.matrixU().leftCols(d));
  const double next = s.size() > d ? s(d) : 0.0;
  fit.gap = s(d - 1) - next;
  if (s(d - 1) <= 1e-12 * std::max(s(0), 1e-300)) fit.flag |= kDegenerate;
  return fit;
}

LocalFit local_second_order(const MatrixXd& D, int d) {
  const LocalFit first = local_first_order(D, d);
  if (first.flag & kDegenerate) return first;
  const int K = static_cast<int>(D.cols());
  const int Dq = d * (d + 1) / 2;
  Eigen::JacobiSVD<MatrixXd> svd1(D, Eigen::ComputeThinU);
  const MatrixXd T = svd1.matrixU().leftCols(d);
  const MatrixXd rho = D.transpose() * T;  // K x d
  MatrixXd A(K, Dq);
  for (int k = 0; k < K; ++k) {
    int col = 0;
    for (int i = 0; i < d; ++i) A(k, col++) = rho(k, i) * rho(k, i);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) A(k, col++) = 2.0 * rho(k, i) * rho(k, j);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  if (qr.rank() < Dq) {
    LocalFit fb = first;
    fb.flag |= kFallback;
    return fb;
  }
  const MatrixXd Y = qr.solve(2.0 * D.transpose());  // Dq x n
  const MatrixXd R2 = 2.0 * D - (A * Y).transpose();  // n x K
  Eigen::JacobiSVD<MatrixXd> svd2(R2, Eigen::ComputeThinU);
  LocalFit fit;
  fit.P = projector_from_basis(svd2.matrixU().leftCols(d));
  fit.gap = first.gap;
  return fit;
}

ProjectionField estimate_projection_at(const MatrixXd& reference, const MatrixXd& queries, int K, int d,
                                       ProjectionSource order) {
  if (order == ProjectionSource::Analytic) throw std::invalid_argument("estimate_projection_at: analytic requested");
  check_K(K, d, static_cast<int>(reference.rows()), order);
  const auto nbr = knn(reference, queries, K);
  ProjectionField f;
  f.source = order;
  f.d = d;
  f.K_used = K;
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    const MatrixXd D = differences(reference, queries.row(i), nbr[i]);
    LocalFit fit = order == ProjectionSource::FirstOrder ? local_first_order(D, d) : local_second_order(D, d);
    f.mats.push_back(std::move(fit.P));
    f.flags.push_back(fit.flag);
    f.gaps.push_back(fit.gap);
  }
  return f;
}

namespace {

ProjectionField estimate_self(const PointCloud& cloud, int K, int d, ProjectionSource order) {
  check_K(K, d, cloud.N(), order);
  const auto nbr = knn_self(cloud.points, K);
  ProjectionField f;
  f.source = order;
  f.d = d;
  f.K_used = K;
  for (int i = 0; i < cloud.N(); ++i) {
    const MatrixXd D = differences(cloud.points, cloud.points.row(i), nbr[i]);
    LocalFit fit = order == ProjectionSource::FirstOrder ? local_first_order(D, d) : local_second_order(D, d);
    f.mats.push_back(std::move(fit.P));
    f.flags.push_back(fit.flag);
    f.gaps.push_back(fit.gap);
  }
  return f;
}

}  // namespace

ProjectionField first_order_svd(const PointCloud& cloud, int K, int d) {
  return estimate_self(cloud, K, d, ProjectionSource::FirstOrder);
}

ProjectionField second_order_svd(const PointCloud& cloud, int K, int d) {
  return estimate_self(cloud, K, d, ProjectionSource::SecondOrder);
}

}  // namespace rbfm
