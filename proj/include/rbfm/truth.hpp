#pragma once

#include <functional>
#include <vector>

#include "rbfm/manifold.hpp"

namespace rbfm {

struct EigenLevel {
  double value;
  int multiplicity;
};

// Maps an ambient point to an eigenfunction value (size 1) or a tangent vector (size n).
using Evaluator = std::function<VectorXd(const VectorXd&)>;

struct EigenTruth {
  std::vector<EigenLevel> levels;  // ascending
  std::vector<Evaluator> modes;    // one per expanded mode, in level order
  int value_dim = 1;

  // Eigenvalues repeated by multiplicity; count < 0 means all.
  std::vector<double> expanded(int count = -1) const;
  int total_modes() const;

  // N x count matrix of scalar modes first..first+count-1.
  MatrixXd evaluate_scalar(const MatrixXd& points, int first, int count) const;
  // nN x count matrix of stacked vector fields (U^1; ...; U^n).
  MatrixXd evaluate_vector(const MatrixXd& points, int first, int count) const;
};

enum class VectorLaplacian { Bochner, Hodge, Lichnerowicz };

// `count` is the number of distinct eigenvalues returned.
EigenTruth scalar_eigen_truth(const ManifoldSpec& spec, int count, int N_theta = 2048);

EigenTruth sturm_liouville_truth(const ManifoldSpec& spec, int N_theta, int max_fourier_mode, int per_mode = 40);

EigenTruth vector_eigen_truth(const ManifoldSpec& spec, VectorLaplacian which, int max_degree = 6);

// Test field U = sin(theta) dX/dtheta on the ellipse, with closed-form derivatives, all stacked (U^1; U^2).
struct EllipseFieldTruth {
  VectorXd U;
  MatrixXd grad;       // 2N x 2, column i holds the i-th ambient slot of grad U
  VectorXd bochner;
  VectorXd covariant;  // nabla_U U
};
EllipseFieldTruth ellipse_field_truth(const ManifoldSpec& spec, const MatrixXd& theta);

std::string to_string(VectorLaplacian v);
VectorLaplacian vector_laplacian_from_string(const std::string& s);

}  // namespace rbfm
