#include "rbfm/scalar_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace rbfm {

MatrixXd ScalarOperatorSet::G(int i) const { return A.at(i) * basis.transpose(); }

MatrixXd ScalarOperatorSet::apply(int i, const MatrixXd& X) const {
  MatrixXd t = basis.transpose() * X;
  return A.at(i) * t;
}

MatrixXd ScalarOperatorSet::apply_transpose(int i, const MatrixXd& X) const {
  MatrixXd t = A.at(i).transpose() * X;
  return basis * t;
}

void ScalarOperatorSet::scale(double c) {
  for (auto& a : A) a *= c;
}

ScalarOperatorSet build_grad_matrices(const InterpolationSystem& sys, const ProjectionField& proj) {
  const int N = sys.N(), n = sys.n();
  if (proj.N() != N || proj.n() != n) throw std::invalid_argument("build_grad_matrices: projection does not match cloud");
  MatrixXd W(N, N);
  for (int k = 0; k < N; ++k) {
    W(k, k) = kernel_deriv_over_r(sys.model, 0.0);
    for (int j = k + 1; j < N; ++j) {
      const double v = kernel_deriv_over_r(sys.model, (sys.points.row(j) - sys.points.row(k)).norm());
      W(j, k) = v;
      W(k, j) = v;
    }
  }
  const MatrixXd right = sys.basis * sys.inv_lambda.asDiagonal();  // Phi^+ = right * V_L^T
  ScalarOperatorSet ops;
  ops.basis = sys.basis;
  ops.kernel = sys.model;
  ops.N = N;
  ops.n = n;
  MatrixXd J(N, N);
  MatrixXd prow(N, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < N; ++j) prow.row(j) = proj.mats[j].row(i);
    // J_jk = w_jk p_i(x_j).(x_j - x_k)
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < N; ++j) {
        double s = 0;
        for (int c = 0; c < n; ++c) s += prow(j, c) * (sys.points(j, c) - sys.points(k, c));
        J(j, k) = W(j, k) * s;
      }
    ops.A.push_back(J * right);
  }
  return ops;
}

MatrixXd laplace_beltrami_nonsymmetric(const ScalarOperatorSet& ops) {
  ReducedOperator r = laplace_beltrami_nonsymmetric_reduced(ops);
  return r.lift * ops.basis.transpose();
}

ReducedOperator laplace_beltrami_nonsymmetric_reduced(const ScalarOperatorSet& ops) {
  const int L = ops.rank();
  ReducedOperator r;
  r.full_dim = ops.N;
  r.lift = MatrixXd::Zero(ops.N, L);
  for (int i = 0; i < ops.n; ++i) {
    const MatrixXd C = ops.basis.transpose() * ops.A[i];  // L x L
    r.lift.noalias() -= ops.A[i] * C;
  }
  r.K = ops.basis.transpose() * r.lift;
  return r;
}

namespace {
void check_density(const VectorXd& q, int N) {
  if (q.size() != N) throw std::invalid_argument("density length does not match the cloud");
  if (!(q.minCoeff() > 0)) throw std::invalid_argument("density must be strictly positive");
}
}  // namespace

GeneralizedPair laplace_beltrami_symmetric(const ScalarOperatorSet& ops, const VectorXd& q) {
  LowRankPair lr = laplace_beltrami_symmetric_lowrank(ops, q);
  GeneralizedPair p;
  p.A = symmetrize(lr.F.transpose() * lr.K * lr.F);
  p.b = lr.b;
  return p;
}

LowRankPair laplace_beltrami_symmetric_lowrank(const ScalarOperatorSet& ops, const VectorXd& q) {
  check_density(q, ops.N);
  const VectorXd qinv = q.cwiseInverse();
  const int L = ops.rank();
  LowRankPair p;
  p.K = MatrixXd::Zero(L, L);
  for (int i = 0; i < ops.n; ++i) p.K.noalias() += ops.A[i].transpose() * qinv.asDiagonal() * ops.A[i];
  p.K = symmetrize(p.K);
  p.F = ops.basis.transpose();
  p.b = qinv;
  return p;
}

int reliable_mode_budget(int N) { return static_cast<int>(std::floor(std::sqrt(double(N)))); }

}  // namespace rbfm
