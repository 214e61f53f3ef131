#pragma once

#include "rbfm/kernel.hpp"
#include "rbfm/manifold.hpp"

namespace rbfm {

// Phi_jk = phi_s(|x_j - x_k|) with a truncated pseudo-inverse. Phi is symmetric, so its SVD is read off a
// symmetric eigendecomposition: singular values |lambda|, left vectors V, right vectors V sign(lambda).
struct InterpolationSystem {
  MatrixXd points;   // N x n copy of the cloud
  KernelModel model;
  MatrixXd Phi;      // N x N
  VectorXd sigma;    // all singular values, descending
  int rank = 0;      // L
  MatrixXd basis;    // N x L retained eigenvectors V_L
  VectorXd inv_lambda;  // L reciprocals of the retained signed eigenvalues

  int N() const { return static_cast<int>(points.rows()); }
  int n() const { return static_cast<int>(points.cols()); }
};

InterpolationSystem build_system(const PointCloud& cloud, const KernelModel& model);
InterpolationSystem build_system(const MatrixXd& points, const KernelModel& model);

MatrixXd kernel_matrix(const MatrixXd& a, const MatrixXd& b, const KernelModel& model);

MatrixXd pinv_apply(const InterpolationSystem& sys, const MatrixXd& rhs);
VectorXd pinv_apply(const InterpolationSystem& sys, const VectorXd& rhs);
MatrixXd pinv_matrix(const InterpolationSystem& sys);

double interpolate_eval(const InterpolationSystem& sys, const VectorXd& coeffs, const VectorXd& query);

// Euclidean gradient (n-vector) of the interpolant with coefficients `coeffs` at `query`.
VectorXd interpolate_grad(const InterpolationSystem& sys, const VectorXd& coeffs, const VectorXd& query);

// Euclidean partial derivatives of the interpolants at the nodes: returns n matrices, the s-th being
// E_s C with (E_s)_jk = (x_j - x_k)_s phi'(r_jk)/r_jk.
std::vector<MatrixXd> node_gradients(const InterpolationSystem& sys, const MatrixXd& coeffs);

}  // namespace rbfm
