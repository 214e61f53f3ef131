#pragma once

#include "rbfm/interpolation.hpp"
#include "rbfm/projection.hpp"
#include "rbfm/spectral.hpp"

namespace rbfm {

// G_i = J_i Phi^+ kept in factored form G_i = A_i V_L^T.
struct ScalarOperatorSet {
  std::vector<MatrixXd> A;  // n factors, N x L
  MatrixXd basis;           // V_L, N x L
  KernelModel kernel;
  int N = 0;
  int n = 0;

  int rank() const { return static_cast<int>(basis.cols()); }
  MatrixXd G(int i) const;
  MatrixXd apply(int i, const MatrixXd& X) const;            // G_i X
  MatrixXd apply_transpose(int i, const MatrixXd& X) const;  // G_i^T X
  void scale(double c);
};

ScalarOperatorSet build_grad_matrices(const InterpolationSystem& sys, const ProjectionField& proj);

MatrixXd laplace_beltrami_nonsymmetric(const ScalarOperatorSet& ops);
ReducedOperator laplace_beltrami_nonsymmetric_reduced(const ScalarOperatorSet& ops);

GeneralizedPair laplace_beltrami_symmetric(const ScalarOperatorSet& ops, const VectorXd& q);
LowRankPair laplace_beltrami_symmetric_lowrank(const ScalarOperatorSet& ops, const VectorXd& q);

int reliable_mode_budget(int N);

}  // namespace rbfm
