#pragma once

#include <vector>

#include "rbfm/projection.hpp"

namespace rbfm {

// Indices of the K nearest reference rows for each query row, nearest first.
// Reference rows at exactly zero distance from the query are skipped.
std::vector<std::vector<int>> knn(const MatrixXd& reference, const MatrixXd& queries, int K);

// Same, for the cloud against itself; each point's own index is skipped.
std::vector<std::vector<int>> knn_self(const MatrixXd& points, int K);

int default_tangent_K(int d);

ProjectionField first_order_svd(const PointCloud& cloud, int K, int d);
ProjectionField second_order_svd(const PointCloud& cloud, int K, int d);

// Estimate P at `queries` using neighbours drawn from a (typically larger) reference cloud.
ProjectionField estimate_projection_at(const MatrixXd& reference, const MatrixXd& queries, int K, int d,
                                       ProjectionSource order);

// Local fit at one base point; `D` holds the neighbour differences y_i - x as columns.
struct LocalFit {
  MatrixXd P;
  double gap = 0;
  std::uint8_t flag = 0;
};
LocalFit local_first_order(const MatrixXd& D, int d);
LocalFit local_second_order(const MatrixXd& D, int d);

}  // namespace rbfm
