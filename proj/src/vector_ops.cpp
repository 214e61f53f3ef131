#include "rbfm/vector_ops.hpp"

#include <stdexcept>

namespace rbfm {

namespace {

auto block(const MatrixXd& X, int r, int N) { return X.middleRows(static_cast<Eigen::Index>(r) * N, N); }
auto block(MatrixXd& X, int r, int N) { return X.middleRows(static_cast<Eigen::Index>(r) * N, N); }

void check_rows(const VectorOperatorSet& v, const MatrixXd& X) {
  if (X.rows() != static_cast<Eigen::Index>(v.n) * v.N) throw std::invalid_argument("vector operator: expected nN rows");
}

}  // namespace

VectorOperatorSet build_vector_ops(const ScalarOperatorSet& ops, const ProjectionField& proj) {
  if (proj.N() != ops.N || proj.n() != ops.n) throw std::invalid_argument("build_vector_ops: projection mismatch");
  VectorOperatorSet v;
  v.scalar = ops;
  v.P = proj.mats;
  v.N = ops.N;
  v.n = ops.n;
  v.d = proj.d;
  v.pc.resize(v.N, v.n * v.n);
  for (int j = 0; j < v.N; ++j)
    for (int r = 0; r < v.n; ++r)
      for (int c = 0; c < v.n; ++c) v.pc(j, r * v.n + c) = proj.mats[j](r, c);
  return v;
}

MatrixXd VectorOperatorSet::apply_P(const MatrixXd& X) const {
  check_rows(*this, X);
  MatrixXd Y = MatrixXd::Zero(X.rows(), X.cols());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) block(Y, r, N).noalias() += pc.col(r * n + c).asDiagonal() * block(X, c, N);
  return Y;
}

MatrixXd VectorOperatorSet::apply_H(int i, const MatrixXd& X) const {
  check_rows(*this, X);
  MatrixXd GX(X.rows(), X.cols());
  for (int c = 0; c < n; ++c) block(GX, c, N) = scalar.apply(i, block(X, c, N));
  return apply_P(GX);
}

MatrixXd VectorOperatorSet::apply_S(int i, const MatrixXd& X) const {
  check_rows(*this, X);
  // block (r, c) = diag(p_ci) G_r
  MatrixXd Y = MatrixXd::Zero(X.rows(), X.cols());
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const MatrixXd GX = scalar.apply(r, block(X, c, N));
      block(Y, r, N).noalias() += pc.col(c * n + i).asDiagonal() * GX;
    }
  }
  return Y;
}

MatrixXd VectorOperatorSet::apply_div(const MatrixXd& X) const {
  check_rows(*this, X);
  MatrixXd D = MatrixXd::Zero(N, X.cols());
  for (int k = 0; k < n; ++k) D += scalar.apply(k, block(X, k, N));
  return D;
}

MatrixXd VectorOperatorSet::apply_T(const MatrixXd& X) const {
  const MatrixXd D = apply_div(X);
  MatrixXd Y(X.rows(), X.cols());
  for (int j = 0; j < n; ++j) block(Y, j, N) = scalar.apply(j, D);
  return Y;
}

MatrixXd VectorOperatorSet::Potimes() const { return apply_P(MatrixXd::Identity(n * N, n * N)); }
MatrixXd VectorOperatorSet::H(int i) const { return apply_H(i, MatrixXd::Identity(n * N, n * N)); }
MatrixXd VectorOperatorSet::S(int i) const { return apply_S(i, MatrixXd::Identity(n * N, n * N)); }
MatrixXd VectorOperatorSet::T() const { return apply_T(MatrixXd::Identity(n * N, n * N)); }

MatrixXd VectorOperatorSet::range_basis() const {
  MatrixXd Z = MatrixXd::Zero(static_cast<Eigen::Index>(n) * N, static_cast<Eigen::Index>(d) * N);
  for (int j = 0; j < N; ++j) {
    const MatrixXd Tj = tangent_basis(P[j], d);
    for (int a = 0; a < d; ++a)
      for (int r = 0; r < n; ++r) Z(static_cast<Eigen::Index>(r) * N + j, static_cast<Eigen::Index>(a) * N + j) = Tj(r, a);
  }
  return Z;
}

MatrixXd vector_laplacian_apply(VectorLaplacian kind, const VectorOperatorSet& v, const MatrixXd& X) {
  MatrixXd Y = MatrixXd::Zero(X.rows(), X.cols());
  for (int i = 0; i < v.n; ++i) {
    MatrixXd inner = v.apply_H(i, X);
    if (kind == VectorLaplacian::Hodge) inner -= v.apply_S(i, X);
    if (kind == VectorLaplacian::Lichnerowicz) inner += v.apply_S(i, X);
    Y -= v.apply_H(i, inner);
  }
  if (kind == VectorLaplacian::Hodge) Y -= v.apply_T(X);
  return Y;
}

MatrixXd vector_laplacian_nonsymmetric(VectorLaplacian kind, const VectorOperatorSet& v) {
  return vector_laplacian_apply(kind, v, MatrixXd::Identity(v.n * v.N, v.n * v.N));
}

MatrixXd component_basis(const VectorOperatorSet& v) {
  const int L = v.scalar.rank();
  MatrixXd R = MatrixXd::Zero(static_cast<Eigen::Index>(v.n) * v.N, static_cast<Eigen::Index>(v.n) * L);
  for (int r = 0; r < v.n; ++r)
    R.block(static_cast<Eigen::Index>(r) * v.N, static_cast<Eigen::Index>(r) * L, v.N, L) = v.scalar.basis;
  return R;
}

ReducedOperator vector_laplacian_nonsymmetric_reduced(VectorLaplacian kind, const VectorOperatorSet& v) {
  const MatrixXd R = component_basis(v);
  ReducedOperator op;
  op.full_dim = static_cast<int>(R.rows());
  op.lift = vector_laplacian_apply(kind, v, R);
  op.K = R.transpose() * op.lift;
  return op;
}

RestrictedPair vector_laplacian_symmetric(VectorLaplacian kind, const VectorOperatorSet& v, const VectorXd& q) {
  if (q.size() != v.N) throw std::invalid_argument("vector_laplacian_symmetric: density length mismatch");
  if (!(q.minCoeff() > 0)) throw std::invalid_argument("vector_laplacian_symmetric: density must be positive");
  RestrictedPair rp;
  rp.Z = v.range_basis();
  const Eigen::Index m = rp.Z.cols();
  const VectorXd qinv = q.cwiseInverse();
  VectorXd qt(static_cast<Eigen::Index>(v.n) * v.N);
  for (int r = 0; r < v.n; ++r) qt.segment(static_cast<Eigen::Index>(r) * v.N, v.N) = qinv;
  MatrixXd A = MatrixXd::Zero(m, m);
  const double half = kind == VectorLaplacian::Bochner ? 1.0 : 0.5;
  for (int i = 0; i < v.n; ++i) {
    MatrixXd W = v.apply_H(i, rp.Z);
    if (kind == VectorLaplacian::Hodge) W -= v.apply_S(i, rp.Z);
    if (kind == VectorLaplacian::Lichnerowicz) W += v.apply_S(i, rp.Z);
    A.noalias() += half * (W.transpose() * qt.asDiagonal() * W);
  }
  if (kind == VectorLaplacian::Hodge) {
    const MatrixXd D = v.apply_div(rp.Z);
    A.noalias() += D.transpose() * qinv.asDiagonal() * D;
  }
  rp.pair.A = symmetrize(A);
  rp.pair.b.resize(m);
  for (int a = 0; a < v.d; ++a) rp.pair.b.segment(static_cast<Eigen::Index>(a) * v.N, v.N) = qinv;
  return rp;
}

RestrictedLowRank vector_laplacian_symmetric_lowrank(VectorLaplacian kind, const VectorOperatorSet& v,
                                                     const VectorXd& q) {
  if (q.size() != v.N) throw std::invalid_argument("vector_laplacian_symmetric: density length mismatch");
  if (!(q.minCoeff() > 0)) throw std::invalid_argument("vector_laplacian_symmetric: density must be positive");
  RestrictedLowRank rp;
  rp.Z = v.range_basis();
  const MatrixXd R = component_basis(v);
  const VectorXd qinv = q.cwiseInverse();
  VectorXd qt(static_cast<Eigen::Index>(v.n) * v.N);
  for (int r = 0; r < v.n; ++r) qt.segment(static_cast<Eigen::Index>(r) * v.N, v.N) = qinv;
  MatrixXd K = MatrixXd::Zero(R.cols(), R.cols());
  const double half = kind == VectorLaplacian::Bochner ? 1.0 : 0.5;
  for (int i = 0; i < v.n; ++i) {
    MatrixXd W = v.apply_H(i, R);
    if (kind == VectorLaplacian::Hodge) W -= v.apply_S(i, R);
    if (kind == VectorLaplacian::Lichnerowicz) W += v.apply_S(i, R);
    K.noalias() += half * (W.transpose() * qt.asDiagonal() * W);
  }
  if (kind == VectorLaplacian::Hodge) {
    const MatrixXd D = v.apply_div(R);
    K.noalias() += D.transpose() * qinv.asDiagonal() * D;
  }
  rp.pair.K = symmetrize(K);
  rp.pair.F = R.transpose() * rp.Z;
  rp.pair.b.resize(rp.Z.cols());
  for (int a = 0; a < v.d; ++a) rp.pair.b.segment(static_cast<Eigen::Index>(a) * v.N, v.N) = qinv;
  return rp;
}

SpectralResult solve_restricted(const RestrictedLowRank& rp, int k, double trivial_rel, double min_resolution) {
  SpectralResult r = solve_symmetric(rp.pair, k, trivial_rel, min_resolution);
  r.vectors = rp.Z.cast<std::complex<double>>() * r.vectors;
  return r;
}

SpectralResult solve_restricted(const RestrictedPair& rp, int k, double trivial_rel) {
  SpectralResult r = solve_symmetric(rp.pair, k, trivial_rel);
  r.vectors = rp.Z.cast<std::complex<double>>() * r.vectors;
  return r;
}

VectorXd covariant_derivative(const VectorOperatorSet& v, const InterpolationSystem& sys, const VectorXd& U,
                              const VectorXd& Y) {
  const int N = v.N, n = v.n;
  if (U.size() != static_cast<Eigen::Index>(n) * N || Y.size() != U.size())
    throw std::invalid_argument("covariant_derivative: fields must have length nN");
  MatrixXd Ym(N, n);
  for (int r = 0; r < n; ++r) Ym.col(r) = Y.segment(static_cast<Eigen::Index>(r) * N, N);
  const std::vector<MatrixXd> grads = node_gradients(sys, pinv_apply(sys, Ym));
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(n) * N);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      out.segment(static_cast<Eigen::Index>(r) * N, N) +=
          U.segment(static_cast<Eigen::Index>(s) * N, N).cwiseProduct(grads[s].col(r));
  return v.apply_P(out);
}

}  // namespace rbfm
