#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "rbfm/manifold.hpp"
#include "rbfm/spectral.hpp"

namespace rbfm {

struct DmConfig {
  int K_neighbors = 0;             // 0 selects ceil(sqrt(N))
  std::optional<double> epsilon;   // empty selects the auto-tuned value
};

struct DmOperator {
  Eigen::SparseMatrix<double> W;  // symmetric Gaussian affinity on the KNN graph
  VectorXd dtilde;                // row sums of the density-normalized affinity
  double epsilon = 0;
  int K_neighbors = 0;
  bool connected = true;
  int components = 1;
  MatrixXd L_sym;                 // (I - Dt^{-1/2} Wt Dt^{-1/2}) / epsilon
};

int default_dm_K(int N);

// Neighbour lists including the point itself, nearest first.
std::vector<std::vector<int>> dm_neighbours(const MatrixXd& points, int K);

double autotune_epsilon(const PointCloud& cloud, int K_neighbors);

DmOperator dm_laplacian(const PointCloud& cloud, const DmConfig& config);

// Eigenpairs of the DM generator; vectors are returned in the original (non-symmetrized) coordinates.
SpectralResult solve_dm(const DmOperator& op, int k);

}  // namespace rbfm
