#include "rbfm/linalg.hpp"

#include <lapacke.h>

#include <stdexcept>
#include <string>

namespace rbfm {

namespace {

void check(lapack_int info, const char* routine) {
  if (info != 0) throw std::runtime_error(std::string(routine) + " failed, info=" + std::to_string(info));
}

}  // namespace

SymEig sym_eig(const MatrixXd& A, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  SymEig out;
  out.values.resize(n);
  if (n == 0) return out;
  MatrixXd work = A;
  check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, work.data(), n, out.values.data()),
        "dsyevd");
  if (vectors) out.vectors = std::move(work);
  return out;
}

SymEig sym_eig_range(const MatrixXd& A, int il, int iu, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("sym_eig_range: matrix not square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (il < 0 || iu >= n || il > iu) throw std::invalid_argument("sym_eig_range: bad index range");
  MatrixXd work = A;
  lapack_int m = 0;
  VectorXd w(n);
  const lapack_int cnt = iu - il + 1;
  MatrixXd z(n, vectors ? cnt : 1);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(cnt));
  check(LAPACKE_dsyevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', 'L', n, work.data(), n, 0.0, 0.0, il + 1,
                       iu + 1, 0.0, &m, w.data(), z.data(), n, isuppz.data()),
        "dsyevr");
  SymEig out;
  out.values = w.head(m);
  if (vectors) out.vectors = z.leftCols(m);
  return out;
}

SymEig tridiag_eig_range(const VectorXd& diag, const VectorXd& offdiag, int il, int iu) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  if (offdiag.size() + 1 != diag.size()) throw std::invalid_argument("tridiag_eig_range: size mismatch");
  if (il < 0 || iu >= n || il > iu) throw std::invalid_argument("tridiag_eig_range: bad index range");
  VectorXd d = diag;
  VectorXd e(n);
  e.head(n - 1) = offdiag;
  e(n - 1) = 0.0;
  lapack_int m = 0;
  VectorXd w(n);
  const lapack_int cnt = iu - il + 1;
  MatrixXd z(n, cnt);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(cnt));
  check(LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, il + 1, iu + 1, 0.0, &m,
                       w.data(), z.data(), n, isuppz.data()),
        "dstevr");
  SymEig out;
  out.values = w.head(m);
  out.vectors = z.leftCols(m);
  return out;
}

GenEig nonsym_eig(const MatrixXd& A, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("nonsym_eig: matrix not square");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  GenEig out;
  out.values.resize(n);
  if (n == 0) return out;
  MatrixXd work = A;
  VectorXd wr(n), wi(n);
  MatrixXd vr(n, vectors ? n : 1);
  double dummy = 0.0;
  check(LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n, work.data(), n, wr.data(), wi.data(), &dummy,
                      1, vr.data(), n),
        "dgeev");
  for (lapack_int j = 0; j < n; ++j) out.values(j) = {wr(j), wi(j)};
  if (vectors) {
    out.vectors.resize(n, n);
    for (lapack_int j = 0; j < n; ++j) {
      if (wi(j) == 0.0) {
        out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
      } else {
        for (lapack_int r = 0; r < n; ++r) {
          out.vectors(r, j) = {vr(r, j), vr(r, j + 1)};
          out.vectors(r, j + 1) = {vr(r, j), -vr(r, j + 1)};
        }
        ++j;
      }
    }
  }
  return out;
}

MatrixXd symmetrize(const MatrixXd& A) {
  MatrixXd S(A.rows(), A.cols());
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i) S(i, j) = 0.5 * (A(i, j) + A(j, i));
  return S;
}

MatrixXd leading_eigvecs(const MatrixXd& S, int d) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  return es.eigenvectors().rightCols(d).rowwise().reverse();
}

}  // namespace rbfm
