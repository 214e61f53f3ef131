#pragma once

#include <Eigen/Dense>
#include <complex>

namespace rbfm {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct SymEig {
  VectorXd values;   // ascending
  MatrixXd vectors;  // columns, empty when not requested
};

struct GenEig {
  VectorXcd values;
  MatrixXcd vectors;
};

// Dense symmetric eigendecomposition (LAPACK dsyevd). Only the lower triangle is read.
SymEig sym_eig(const MatrixXd& A, bool vectors = true);

// Eigenpairs il..iu (0-based, inclusive) in ascending order (LAPACK dsyevr).
SymEig sym_eig_range(const MatrixXd& A, int il, int iu, bool vectors = true);

// Symmetric tridiagonal eigenpairs il..iu (0-based, inclusive), ascending (LAPACK dstevr).
SymEig tridiag_eig_range(const VectorXd& diag, const VectorXd& offdiag, int il, int iu);

// Dense nonsymmetric eigendecomposition with right eigenvectors (LAPACK dgeev).
GenEig nonsym_eig(const MatrixXd& A, bool vectors = true);

// Exactly symmetric copy (A + A^T)/2.
MatrixXd symmetrize(const MatrixXd& A);

// Orthonormal basis of the leading d eigenvectors of a symmetric n x n matrix.
MatrixXd leading_eigvecs(const MatrixXd& S, int d);

}  // namespace rbfm
