#pragma once

#include "rbfm/scalar_ops.hpp"

namespace rbfm {

// Vector fields are stacked (U^1; ...; U^n), length nN. All operators are applied blockwise and only
// materialized on request.
struct VectorOperatorSet {
  ScalarOperatorSet scalar;
  std::vector<MatrixXd> P;  // per-point projections
  MatrixXd pc;              // N x n^2, column r*n+c holds P_rc at every point
  int N = 0;
  int n = 0;
  int d = 0;

  double p(int r, int c, int j) const { return pc(j, r * n + c); }

  MatrixXd apply_P(const MatrixXd& X) const;
  MatrixXd apply_H(int i, const MatrixXd& X) const;
  MatrixXd apply_S(int i, const MatrixXd& X) const;
  MatrixXd apply_T(const MatrixXd& X) const;
  MatrixXd apply_div(const MatrixXd& X) const;  // sum_k G_k X^k, N x m

  MatrixXd Potimes() const;
  MatrixXd H(int i) const;
  MatrixXd S(int i) const;
  MatrixXd T() const;

  // nN x dN orthonormal basis of the range of P_otimes; column a*N+j carries the a-th tangent vector at x_j.
  MatrixXd range_basis() const;
};

VectorOperatorSet build_vector_ops(const ScalarOperatorSet& ops, const ProjectionField& proj);

// Non-symmetric operators.
MatrixXd vector_laplacian_apply(VectorLaplacian kind, const VectorOperatorSet& v, const MatrixXd& X);
MatrixXd vector_laplacian_nonsymmetric(VectorLaplacian kind, const VectorOperatorSet& v);
ReducedOperator vector_laplacian_nonsymmetric_reduced(VectorLaplacian kind, const VectorOperatorSet& v);

// Symmetric pencil restricted to the range of P_otimes: A_Z = Z^T A Z, B_Z = Z^T P Q^{-1} P Z (diagonal).
struct RestrictedPair {
  GeneralizedPair pair;
  MatrixXd Z;
};
RestrictedPair vector_laplacian_symmetric(VectorLaplacian kind, const VectorOperatorSet& v, const VectorXd& q);
SpectralResult solve_restricted(const RestrictedPair& rp, int k, double trivial_rel = 1e-7);

// Same pencil with A_Z = F^T K F, F = (I_n (x) V_L^T) Z; solved at size nL.
struct RestrictedLowRank {
  LowRankPair pair;
  MatrixXd Z;
};
RestrictedLowRank vector_laplacian_symmetric_lowrank(VectorLaplacian kind, const VectorOperatorSet& v,
                                                     const VectorXd& q);
SpectralResult solve_restricted(const RestrictedLowRank& rp, int k, double trivial_rel = 1e-7,
                                double min_resolution = 0.5);

// I_n (x) V_L, nN x nL.
MatrixXd component_basis(const VectorOperatorSet& v);

// P_otimes applied to the directional derivative of the interpolated Y along U.
VectorXd covariant_derivative(const VectorOperatorSet& v, const InterpolationSystem& sys, const VectorXd& U,
                              const VectorXd& Y);

}  // namespace rbfm
